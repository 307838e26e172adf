//! Tab-separated output tables, each with a header line.

use std::io::{self, Write};

use pcma_core::stats::CommunityStats;

use crate::run::TimingTable;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

pub fn write_communities<W: Write>(stats: &CommunityStats, mut out: W) -> io::Result<()> {
    writeln!(out, "community\tsize\tl\tg\tinternal_endpoints\texternal_edges")?;
    for (i, r) in stats.communities.iter().enumerate() {
        writeln!(
            out,
            "{i}\t{}\t{}\t{}\t{}\t{}",
            r.size,
            opt(r.l),
            opt(r.g.map(|g| format!("{g:.6}"))),
            r.internal_endpoints,
            r.external_edges
        )?;
    }
    Ok(())
}

pub fn write_memberships<W: Write>(stats: &CommunityStats, mut out: W) -> io::Result<()> {
    writeln!(out, "vertex\tmemberships")?;
    for (v, m) in stats.memberships.iter().enumerate() {
        writeln!(out, "{v}\t{m}")?;
    }
    Ok(())
}

pub fn write_histogram<W: Write>(stats: &CommunityStats, mut out: W) -> io::Result<()> {
    writeln!(out, "size\tg_bin\trescaled_count")?;
    for c in &stats.histogram {
        writeln!(out, "{}\t{:.4}\t{:.6}", c.size, c.g_bin, c.rescaled)?;
    }
    Ok(())
}

pub fn write_timing<W: Write>(table: &TimingTable, mut out: W) -> io::Result<()> {
    writeln!(out, "n\tseconds\tcommunities\tworkers")?;
    for r in &table.rows {
        writeln!(
            out,
            "{}\t{:.4}\t{}\t{}",
            r.n, r.seconds, r.communities, table.workers
        )?;
    }
    writeln!(out, "# slope\t{:.4}", table.slope)
}

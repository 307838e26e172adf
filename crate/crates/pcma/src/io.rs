//! Text formats: edge lists, covers, partial and merged-pool dumps.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use pcma_core::ego::PartialCommunity;
use pcma_core::graph::BuildReport;
use pcma_core::merger::Community;
use pcma_core::postprocess::{CoverCommunity, MergeStats};
use pcma_core::{Cover, Graph, VertexId};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("input holds no edges")]
    Empty,
}

fn parse_error(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let t = l.trim();
            (!t.is_empty() && !t.starts_with('#')).then(|| Ok((i + 1, t.to_owned())))
        }
    })
}

fn two_tokens(line: usize, text: &str) -> Result<(&str, &str), FormatError> {
    let mut tokens = text.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(parse_error(line, "expected two vertex ids")),
    }
}

fn parse_id(line: usize, token: &str) -> Result<VertexId, FormatError> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("invalid vertex id {token:?}")))
}

/// A loaded graph with the dropped-edge counts. `labels[v]` is the original
/// token of dense id `v` when the input was relabeled.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub report: BuildReport,
    pub labels: Option<Vec<String>>,
}

/// Reads a whitespace-separated edge list, using ids verbatim.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph, FormatError> {
    let mut edges = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let (a, b) = two_tokens(line, &text)?;
        edges.push((parse_id(line, a)?, parse_id(line, b)?));
    }
    if edges.is_empty() {
        return Err(FormatError::Empty);
    }
    let (graph, report) = Graph::from_edges(0, edges);
    Ok(LoadedGraph {
        graph,
        report,
        labels: None,
    })
}

/// Reads an edge list with arbitrary vertex tokens, assigning dense ids in
/// order of first appearance.
pub fn load_edge_list_relabeled<R: BufRead>(reader: R) -> Result<LoadedGraph, FormatError> {
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |token: &str| {
        *ids.entry(token.to_owned()).or_insert_with(|| {
            labels.push(token.to_owned());
            (labels.len() - 1) as VertexId
        })
    };
    for item in content_lines(reader) {
        let (line, text) = item?;
        let (a, b) = two_tokens(line, &text)?;
        edges.push((intern(a), intern(b)));
    }
    if edges.is_empty() {
        return Err(FormatError::Empty);
    }
    let (graph, report) = Graph::from_edges(labels.len(), edges);
    Ok(LoadedGraph {
        graph,
        report,
        labels: Some(labels),
    })
}

/// Dense id and original token, one pair per line.
pub fn write_mapping<W: Write>(labels: &[String], mut out: W) -> io::Result<()> {
    for (id, label) in labels.iter().enumerate() {
        writeln!(out, "{id}\t{label}")?;
    }
    Ok(())
}

/// Canonical edge list: smaller id first, lexicographic order.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> io::Result<()> {
    for (a, b) in graph.edges() {
        writeln!(out, "{a} {b}")?;
    }
    Ok(())
}

fn join_ids(buf: &mut String, ids: &[VertexId]) {
    for (i, v) in ids.iter().enumerate() {
        if i > 0 {
            buf.push(' ');
        }
        write!(buf, "{v}").unwrap();
    }
}

/// One community per line. The annotated form writes `id:S` members followed
/// by `| l=.. w=.. g=..`; communities without merge stats are written plain
/// either way.
pub fn write_cover<W: Write>(cover: &Cover, annotated: bool, mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for c in &cover.communities {
        line.clear();
        match (&c.stats, annotated) {
            (Some(stats), true) => {
                for (i, (v, s)) in c.members.iter().zip(&stats.scores).enumerate() {
                    if i > 0 {
                        line.push(' ');
                    }
                    write!(line, "{v}:{s}").unwrap();
                }
                // `{}` on f64 prints the shortest text that reads back exactly.
                write!(line, " | l={} w={} g={}", stats.l, stats.w, stats.g).unwrap();
            }
            _ => join_ids(&mut line, &c.members),
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_annotated(line: usize, text: &str) -> Result<CoverCommunity, FormatError> {
    let (body, meta) = text
        .split_once('|')
        .ok_or_else(|| parse_error(line, "annotated community lacks the '| l= w= g=' block"))?;
    let mut members = Vec::new();
    for token in body.split_whitespace() {
        let (v, s) = token
            .split_once(':')
            .ok_or_else(|| parse_error(line, format!("expected id:S, found {token:?}")))?;
        let s: u32 = s
            .parse()
            .map_err(|_| parse_error(line, format!("invalid score in {token:?}")))?;
        members.push((parse_id(line, v)?, s));
    }
    let (mut l, mut w, mut g) = (None, None, None);
    for field in meta.split_whitespace() {
        let bad = || parse_error(line, format!("invalid metadata field {field:?}"));
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        match key {
            "l" => l = Some(value.parse::<u32>().map_err(|_| bad())?),
            "w" => w = Some(value.parse::<u64>().map_err(|_| bad())?),
            "g" => g = Some(value.parse::<f64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let (Some(l), Some(w), Some(g)) = (l, w, g) else {
        return Err(parse_error(line, "metadata needs l, w and g"));
    };
    members.sort_unstable();
    if members.windows(2).any(|p| p[0].0 == p[1].0) {
        return Err(parse_error(line, "repeated member"));
    }
    if members.iter().any(|&(_, s)| s == 0 || s > l) {
        return Err(parse_error(line, "scores must lie in 1..=l"));
    }
    let (members, scores) = members.into_iter().unzip();
    Ok(CoverCommunity {
        members,
        stats: Some(MergeStats { scores, l, w, g }),
    })
}

/// Reads a plain or annotated cover. `n` defaults to one past the largest id.
pub fn read_cover<R: BufRead>(reader: R, n: Option<usize>) -> Result<Cover, FormatError> {
    let mut communities = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let community = if text.contains('|') || text.contains(':') {
            parse_annotated(line, &text)?
        } else {
            let ids = text
                .split_whitespace()
                .map(|t| parse_id(line, t))
                .collect::<Result<Vec<_>, _>>()?;
            CoverCommunity::plain(ids)
        };
        communities.push(community);
    }
    let max = communities
        .iter()
        .filter_map(|c| c.members.last())
        .map(|&v| v as usize + 1)
        .max()
        .unwrap_or(0);
    let n = match n {
        Some(n) if n < max => {
            return Err(parse_error(
                0,
                format!("member id {} exceeds the {n} vertices", max - 1),
            ));
        }
        Some(n) => n,
        None => max,
    };
    Ok(Cover { n, communities })
}

/// `origin<TAB>members`, one partial per line.
pub fn write_partials<W: Write>(partials: &[PartialCommunity], mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for p in partials {
        line.clear();
        write!(line, "{}\t", p.origin).unwrap();
        join_ids(&mut line, &p.members);
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// The raw merged pool, `l=<l> w=<w> g=<g> members: id:S ...`.
pub fn write_merged<W: Write>(pool: &[Community], mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for c in pool {
        line.clear();
        write!(line, "l={} w={} g={:.6} members:", c.l(), c.w(), c.g()).unwrap();
        for &(v, s) in c.members() {
            write!(line, " {v}:{s}").unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = load_edge_list("0 1\n1 2\n2 0".as_bytes()).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (3, 3));
    }

    #[test]
    fn duplicates_and_loops_counted() {
        let g = load_edge_list("0 1\n1 0\n0 0\n".as_bytes()).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (2, 1));
        assert_eq!(g.report.dropped(), 2);
    }

    #[test]
    fn comments_and_tabs() {
        let g = load_edge_list("# header\n\n3\t4\n  4   5  \n".as_bytes()).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (6, 2));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = load_edge_list("0 1\n# c\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
        let err = load_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
        let err = load_edge_list("-1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            load_edge_list("# nothing\n".as_bytes()),
            Err(FormatError::Empty)
        ));
    }

    #[test]
    fn relabeling_is_dense() {
        let g = load_edge_list_relabeled("alice bob\nbob 9000\n".as_bytes()).unwrap();
        assert_eq!(g.graph.vertex_count(), 3);
        assert_eq!(g.labels.as_deref().unwrap(), ["alice", "bob", "9000"]);
        let mut out = Vec::new();
        write_mapping(g.labels.as_ref().unwrap(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0\talice\n1\tbob\n2\t9000\n");
    }

    #[test]
    fn canonical_edge_list() {
        let g = load_edge_list("2 1\n0 2\n1 0\n".as_bytes()).unwrap();
        let mut out = Vec::new();
        write_edge_list(&g.graph, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn cover_round_trips() {
        let cover = Cover {
            n: 10,
            communities: vec![
                CoverCommunity {
                    members: vec![1, 4, 7],
                    stats: Some(MergeStats {
                        scores: vec![3, 12, 5],
                        l: 12,
                        w: 20,
                        g: 0.1 + 0.2,
                    }),
                },
                CoverCommunity::plain(vec![9, 2, 3]),
            ],
        };
        let mut text = Vec::new();
        write_cover(&cover, true, &mut text).unwrap();
        assert_eq!(read_cover(text.as_slice(), Some(10)).unwrap(), cover);

        let mut plain = Vec::new();
        write_cover(&cover, false, &mut plain).unwrap();
        assert_eq!(String::from_utf8(plain.clone()).unwrap(), "1 4 7\n2 3 9\n");
        assert_eq!(read_cover(plain.as_slice(), None).unwrap().n, 10);
    }

    #[test]
    fn malformed_covers() {
        assert!(read_cover("1 2 x\n".as_bytes(), None).is_err());
        assert!(read_cover("1:2 3:1\n".as_bytes(), None).is_err());
        assert!(read_cover("1:2 3:1 | l=1 w=3 g=1\n".as_bytes(), None).is_err());
        assert!(read_cover("1:1 3:1 | l=1 w=2\n".as_bytes(), None).is_err());
        assert!(read_cover("1 2 30\n".as_bytes(), Some(10)).is_err());
    }

    #[test]
    fn dumps() {
        let mut out = Vec::new();
        write_partials(&[PartialCommunity::new(4, vec![1, 4, 9])], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "4\t1 4 9\n");

        let a = Community::from_partial(&[1, 2, 3, 4]);
        let b = Community::from_partial(&[3, 4, 5, 6]);
        let mut out = Vec::new();
        write_merged(&[pcma_core::merger::merge(&a, &b)], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "l=2 w=8 g=0.500000 members: 1:1 2:1 3:2 4:2 5:1 6:1\n"
        );
    }
}

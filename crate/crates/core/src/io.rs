//! Edge-list ingestion and the binary graph cache.
//!
//! Text format: one edge per line, `u v` or `u v w`, whitespace separated.
//! Lines starting with `#` or `%` are comments. Arcs are symmetrized,
//! self-loops dropped, repeated pairs merged (summed when weighted, collapsed
//! otherwise) and only the largest connected component is kept. Vertices are
//! relabeled to `0..n` in increasing order of their original id.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{DksError, Result};
use crate::graph::{DuplicatePolicy, Graph};

const CACHE_MAGIC: &[u8; 8] = b"DKSGRAPH";
const CACHE_VERSION: u32 = 1;
const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Ingestion switches. The default keeps only the largest component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub weighted: bool,
    pub largest_component: bool,
}

impl LoadOptions {
    pub fn new(weighted: bool) -> Self {
        LoadOptions {
            weighted,
            largest_component: true,
        }
    }
}

/// Parses an edge list and returns the preprocessed largest component.
pub fn load_edge_list<R: BufRead>(source: R, weighted: bool) -> Result<Graph> {
    load_edge_list_with(source, LoadOptions::new(weighted))
}

/// [`load_edge_list`] with explicit options; without component extraction
/// every vertex that appears in some non-loop edge is kept.
pub fn load_edge_list_with<R: BufRead>(source: R, opts: LoadOptions) -> Result<Graph> {
    let weighted = opts.weighted;
    let mut arcs: Vec<(u64, u64, f64)> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let u = parse_id(tokens.next(), line_no)?;
        let v = parse_id(tokens.next(), line_no)?;
        let w = if weighted {
            parse_weight(tokens.next(), line_no)?
        } else {
            1.0
        };
        if u != v {
            arcs.push((u, v, w));
        }
    }
    if arcs.is_empty() {
        return Err(DksError::domain("graph has no edges after preprocessing"));
    }

    let mut ids: Vec<u64> = arcs.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: u64| ids.binary_search(&id).expect("id was collected");
    let policy = if weighted {
        DuplicatePolicy::Sum
    } else {
        DuplicatePolicy::Collapse
    };
    let edges = arcs.iter().map(|&(u, v, w)| (index(u), index(v), w));
    let full = Graph::from_edges(ids.len(), edges, policy)?.with_labels(ids.clone())?;
    Ok(if opts.largest_component {
        full.largest_component()
    } else {
        full
    })
}

fn parse_id(token: Option<&str>, line: usize) -> Result<u64> {
    let token = token.ok_or_else(|| DksError::Parse {
        line,
        message: "missing vertex id".into(),
    })?;
    token.parse::<u64>().map_err(|_| DksError::Parse {
        line,
        message: format!("invalid vertex id {token:?}"),
    })
}

fn parse_weight(token: Option<&str>, line: usize) -> Result<f64> {
    let token = token.ok_or_else(|| DksError::Parse {
        line,
        message: "missing edge weight".into(),
    })?;
    let w: f64 = token.parse().map_err(|_| DksError::Parse {
        line,
        message: format!("invalid edge weight {token:?}"),
    })?;
    if !w.is_finite() {
        return Err(DksError::Parse {
            line,
            message: format!("non-finite edge weight {token:?}"),
        });
    }
    if w < 0.0 {
        return Err(DksError::Parse {
            line,
            message: format!("negative edge weight {w}"),
        });
    }
    if w == 0.0 {
        return Err(DksError::Parse {
            line,
            message: "zero edge weight".into(),
        });
    }
    Ok(w)
}

/// Reads a graph from any byte stream, detecting gzip compression and the
/// binary cache format by their magic bytes. Everything else is parsed as a
/// text edge list.
pub fn read_graph<R: Read>(source: R, weighted: bool) -> Result<Graph> {
    read_graph_with(source, LoadOptions::new(weighted))
}

pub fn read_graph_with<R: Read>(source: R, opts: LoadOptions) -> Result<Graph> {
    read_detect(Box::new(source), opts)
}

fn read_detect(source: Box<dyn Read + '_>, opts: LoadOptions) -> Result<Graph> {
    let mut reader = BufReader::new(source);
    let head = reader.fill_buf()?;
    if head.starts_with(&GZIP_MAGIC) {
        return read_detect(Box::new(MultiGzDecoder::new(reader)), opts);
    }
    if head.starts_with(CACHE_MAGIC) {
        let g = read_cache(reader)?;
        return Ok(if opts.largest_component {
            g.largest_component()
        } else {
            g
        });
    }
    load_edge_list_with(reader, opts)
}

/// Loads a graph from a path; `-` means standard input.
pub fn load_graph(path: &Path, weighted: bool) -> Result<Graph> {
    load_graph_with(path, LoadOptions::new(weighted))
}

pub fn load_graph_with(path: &Path, opts: LoadOptions) -> Result<Graph> {
    if path.as_os_str() == "-" {
        return read_graph_with(io::stdin().lock(), opts);
    }
    read_graph_with(File::open(path)?, opts)
}

/// Writes `g` as a text edge list using the original vertex ids. Weights are
/// printed in shortest round-trip form, so reading the output back (weighted)
/// reproduces `g` exactly when `g` is connected.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W, with_weights: bool) -> Result<()> {
    writeln!(out, "# n={} m={}", g.n(), g.m())?;
    for (&(i, j), &w) in g.edges().iter().zip(g.weights()) {
        if with_weights {
            writeln!(out, "{} {} {}", g.label(i), g.label(j), w)?;
        } else {
            writeln!(out, "{} {}", g.label(i), g.label(j))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Binary cache layout (little endian):
/// magic `DKSGRAPH`, version `u32`, `n: u64`, `m: u64`,
/// `m` edge pairs as `(u64, u64)`, `m` weights as `f64`, `n` labels as `u64`.
pub fn write_cache<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    out.write_all(CACHE_MAGIC)?;
    out.write_all(&CACHE_VERSION.to_le_bytes())?;
    out.write_all(&(g.n() as u64).to_le_bytes())?;
    out.write_all(&(g.m() as u64).to_le_bytes())?;
    for &(i, j) in g.edges() {
        out.write_all(&(i as u64).to_le_bytes())?;
        out.write_all(&(j as u64).to_le_bytes())?;
    }
    for &w in g.weights() {
        out.write_all(&w.to_le_bytes())?;
    }
    for &l in g.labels() {
        out.write_all(&l.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub fn read_cache<R: Read>(mut input: R) -> Result<Graph> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(DksError::Cache("bad magic".into()));
    }
    let mut version = [0u8; 4];
    input.read_exact(&mut version)?;
    let version = u32::from_le_bytes(version);
    if version != CACHE_VERSION {
        return Err(DksError::Cache(format!("unsupported version {version}")));
    }
    let n = read_u64(&mut input)? as usize;
    let m = read_u64(&mut input)? as usize;
    if n == 0 {
        return Err(DksError::Cache("zero vertices".into()));
    }
    let mut edges = Vec::with_capacity(m.min(1 << 24));
    for _ in 0..m {
        let i = read_u64(&mut input)? as usize;
        let j = read_u64(&mut input)? as usize;
        if i >= j || j >= n {
            return Err(DksError::Cache(format!("invalid edge ({i}, {j})")));
        }
        if let Some(&prev) = edges.last() {
            if prev >= (i, j) {
                return Err(DksError::Cache("edges not strictly sorted".into()));
            }
        }
        edges.push((i, j));
    }
    let mut weights = Vec::with_capacity(m.min(1 << 24));
    for _ in 0..m {
        let w = f64::from_bits(read_u64(&mut input)?);
        if !(w.is_finite() && w > 0.0) {
            return Err(DksError::Cache(format!("invalid weight {w}")));
        }
        weights.push(w);
    }
    let labels = (0..n)
        .map(|_| read_u64(&mut input))
        .collect::<Result<Vec<_>>>()?;
    Ok(Graph::from_sorted(n, edges, weights, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, weighted: bool) -> Result<Graph> {
        load_edge_list(text.as_bytes(), weighted)
    }

    #[test]
    fn symmetrizes_and_drops_self_loops() {
        let g = load("1 2\n2 1\n2 2\n2 3\n", false).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.weights(), &[1.0, 1.0]);
        assert_eq!(g.labels(), &[1, 2, 3]);
    }

    #[test]
    fn keeps_largest_component() {
        let g = load("1 2\n3 4\n4 5\n", false).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.labels(), &[3, 4, 5]);
    }

    #[test]
    fn all_components_on_request() {
        let opts = LoadOptions {
            weighted: false,
            largest_component: false,
        };
        let g = load_edge_list_with("1 2\n3 4\n4 5\n".as_bytes(), opts).unwrap();
        assert_eq!((g.n(), g.m()), (5, 3));
    }

    #[test]
    fn weighted_duplicates_sum() {
        let g = load("1 2 0.5\n2 1 0.25\n", true).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.weights()[0], 0.75);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = load("# header\n% other\n\n1 2\n", false).unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = load("1 2\nx 3\n", false).unwrap_err();
        assert!(matches!(err, DksError::Parse { line: 2, .. }), "{err}");
        let err = load("1 2 1.0\n2 3\n", true).unwrap_err();
        assert!(matches!(err, DksError::Parse { line: 2, .. }), "{err}");
        let err = load("1 2 -1.0\n", true).unwrap_err();
        assert!(matches!(err, DksError::Parse { line: 1, .. }), "{err}");
        let err = load("1\n", false).unwrap_err();
        assert!(matches!(err, DksError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_after_preprocessing() {
        assert!(matches!(load("1 1\n# x\n", false), Err(DksError::Domain(_))));
        assert!(matches!(load("", false), Err(DksError::Domain(_))));
    }

    #[test]
    fn cache_rejects_garbage() {
        let mut buf = Vec::new();
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&7u32.to_le_bytes());
        assert!(matches!(read_cache(&buf[..]), Err(DksError::Cache(_))));
    }
}

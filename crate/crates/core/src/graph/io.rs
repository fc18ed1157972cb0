use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// Whitespace-separated `i j w` lines, 0-indexed. `#` starts a comment;
    /// a `# nodes: N` comment fixes the node count (isolated trailing nodes),
    /// otherwise it is one past the largest index. A missing weight means 1.
    #[default]
    EdgeList,
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text, path),
    }
}

pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Graph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_index: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.trim().strip_prefix("nodes:") {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(lineno, format!("bad node count: {e}")))?;
                declared = Some(n);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                lineno,
                format!("expected `i j [w]`, found {} fields", fields.len()),
            ));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| parse_err(lineno, format!("bad node index `{s}`: {e}")))
        };
        let i = idx(fields[0])?;
        let j = idx(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|e| parse_err(lineno, format!("bad weight `{s}`: {e}")))?,
            None => 1.0,
        };
        if i == j {
            return Err(parse_err(lineno, format!("self-loop on node {i}")));
        }
        max_index = Some(max_index.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j, w));
    }
    let n = match (declared, max_index) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(parse_err(0, "no edges and no node count".into())),
    };
    Graph::new(n, edges)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes: {}", g.n_nodes())?;
    for &(i, j, w) in g.edges() {
        writeln!(out, "{i} {j} {w}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    let file = fs::File::create(path)?;
    match format {
        GraphFormat::EdgeList => write_edge_list(g, BufWriter::new(file)),
    }
}

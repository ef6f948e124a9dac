//! TU Dortmund benchmark format.
//!
//! A dataset `DS` is a directory holding:
//! - `DS_A.txt`: one `i, j` line per (directed) edge, 1-indexed global node ids
//! - `DS_graph_indicator.txt`: graph id (1-indexed) of each node, one per line
//! - `DS_graph_labels.txt`: one integer class label per graph
//! - `DS_node_attributes.txt` (optional): comma-separated reals per node

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};

use super::{Dataset, Graph, GraphError};

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, GraphError> {
    let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
        file: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn required(dir: &Path, name: &str, suffix: &str) -> Result<PathBuf, GraphError> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if path.is_file() {
        Ok(path)
    } else {
        Err(GraphError::MissingFile(path.display().to_string()))
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        file: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_int<T: std::str::FromStr>(path: &Path, line: usize, tok: &str) -> Result<T, GraphError> {
    tok.trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse `{}`", tok.trim())))
}

/// Reads a TU-format dataset. Edges are deduplicated and made undirected,
/// node ids are rebased to 0 within each graph, and node attributes (when
/// present) become planar positions from their first two columns.
pub fn parse_tu_dataset(dir: impl AsRef<Path>, name: &str) -> Result<Dataset, GraphError> {
    let dir = dir.as_ref();
    let a_path = required(dir, name, "A")?;
    let ind_path = required(dir, name, "graph_indicator")?;
    let lab_path = required(dir, name, "graph_labels")?;

    let indicator: Vec<usize> = read_lines(&ind_path)?
        .iter()
        .map(|(ln, l)| parse_int(&ind_path, *ln, l))
        .collect::<Result<_, _>>()?;
    let labels: Vec<i64> = read_lines(&lab_path)?
        .iter()
        .map(|(ln, l)| parse_int(&lab_path, *ln, l))
        .collect::<Result<_, _>>()?;
    let num_graphs = labels.len();
    if let Some(&bad) = indicator.iter().find(|&&g| g == 0 || g > num_graphs) {
        return Err(GraphError::LengthMismatch {
            what: "graph labels (indicator references graph id beyond label count)",
            got: num_graphs,
            expected: bad,
        });
    }

    // local index of each global node within its graph
    let mut sizes = vec![0usize; num_graphs];
    let local: Vec<usize> = indicator
        .iter()
        .map(|&g| {
            let idx = sizes[g - 1];
            sizes[g - 1] += 1;
            idx
        })
        .collect();

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    for (ln, l) in read_lines(&a_path)? {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(&a_path, ln, "expected `i, j`"));
        };
        let a: usize = parse_int(&a_path, ln, a)?;
        let b: usize = parse_int(&a_path, ln, b)?;
        for node in [a, b] {
            if node == 0 || node > indicator.len() {
                return Err(parse_err(&a_path, ln, format!("unknown node {node}")));
            }
        }
        let (ga, gb) = (indicator[a - 1], indicator[b - 1]);
        if ga != gb {
            return Err(parse_err(
                &a_path,
                ln,
                format!("edge joins graphs {ga} and {gb}"),
            ));
        }
        if a == b {
            debug!("{}:{ln}: dropping self-loop on node {a}", a_path.display());
            continue;
        }
        edges[ga - 1].push((local[a - 1], local[b - 1]));
    }

    let mut positions: Option<Vec<Vec<[f64; 2]>>> = None;
    let attr_path = dir.join(format!("{name}_node_attributes.txt"));
    if attr_path.is_file() {
        let rows = read_lines(&attr_path)?;
        if rows.len() != indicator.len() {
            return Err(GraphError::LengthMismatch {
                what: "node attributes",
                got: rows.len(),
                expected: indicator.len(),
            });
        }
        let mut per_graph: Vec<Vec<[f64; 2]>> =
            sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (node, (ln, l)) in rows.iter().enumerate() {
            let vals: Vec<f64> = l
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| parse_err(&attr_path, *ln, format!("cannot parse `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            let xy = [
                vals.first().copied().unwrap_or(0.0),
                vals.get(1).copied().unwrap_or(0.0),
            ];
            per_graph[indicator[node] - 1].push(xy);
        }
        positions = Some(per_graph);
    }

    let mut graphs = Vec::with_capacity(num_graphs);
    let mut kept_labels = Vec::with_capacity(num_graphs);
    for g in 0..num_graphs {
        if sizes[g] == 0 {
            warn!("{name}: graph {} has no nodes, skipped", g + 1);
            continue;
        }
        let mut graph = Graph::from_edges_dedup(sizes[g], &edges[g])?.with_id(g + 1);
        if let Some(pos) = positions.as_mut() {
            graph = graph.with_positions(std::mem::take(&mut pos[g]))?;
        }
        graphs.push(graph);
        kept_labels.push(labels[g]);
    }
    Dataset::from_raw_labels(name, graphs, &kept_labels)
}

/// Keeps graphs with `1 <= N <= max_nodes` whose original class is in
/// `keep_classes` (when given), then re-encodes labels to `0..n_c` in
/// ascending original order. Graph order is preserved.
pub fn preprocess(
    dataset: &Dataset,
    max_nodes: usize,
    keep_classes: Option<&[i64]>,
) -> Result<Dataset, GraphError> {
    let keep: Option<BTreeSet<i64>> = keep_classes.map(|c| c.iter().copied().collect());
    let mut graphs = Vec::new();
    let mut raw = Vec::new();
    for (i, g) in dataset.graphs.iter().enumerate() {
        let n = g.num_nodes();
        if n == 0 || n > max_nodes {
            continue;
        }
        let original = dataset.original_label(i);
        if keep.as_ref().is_some_and(|k| !k.contains(&original)) {
            continue;
        }
        graphs.push(g.clone());
        raw.push(original);
    }
    if graphs.is_empty() {
        return Err(GraphError::EmptyDataset);
    }
    Dataset::from_raw_labels(dataset.name.clone(), graphs, &raw)
}

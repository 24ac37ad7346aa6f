//! Undirected simple graphs on contiguous vertex ids, plus the text formats
//! the command-line tools read: whitespace-separated edge lists and
//! insert/delete event logs. Comment lines start with `#`.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("explicit vertex count {given} is smaller than required {required}")]
    VertexCountTooSmall { given: usize, required: usize },
}

/// Undirected simple graph. Vertices are `0..n`; edges are stored once,
/// canonically ordered `(lo, hi)` with `lo < hi`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are canonicalized and
    /// duplicates collapse to one (set semantics). Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph, GraphError> {
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Graph::from_canonical(n, canon))
    }

    /// `edges` must already be canonical `(lo, hi)`, sorted, deduplicated,
    /// and in range.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        // Adjacency built from sorted edges is sorted for the lower endpoint
        // but not the higher one; sort both for deterministic iteration.
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_canonical(n, Vec::new())
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::with_capacity(n.saturating_sub(1) * n / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_canonical(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (lo, hi) = (u.min(v), u.max(v));
        self.edges.binary_search(&(lo, hi)).is_ok()
    }

    /// Subgraph induced by `members`, relabeled onto `0..members.len()`.
    /// Returns the new graph together with the sorted original ids; new id
    /// `i` corresponds to original id `vertices[i]`.
    pub fn induced(&self, members: &BTreeSet<usize>) -> (Graph, Vec<usize>) {
        let vertices: Vec<usize> = members.iter().copied().collect();
        let mut rename = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            rename[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| rename[u] != usize::MAX && rename[v] != usize::MAX)
            .map(|&(u, v)| (rename[u], rename[v]))
            .collect();
        (Graph::from_canonical(vertices.len(), edges), vertices)
    }
}

/// Side channel for what the edge-list loader dropped, plus the smallest
/// vertex count that covers every id mentioned (including ids that only
/// appeared on dropped lines).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicates: usize,
    pub min_vertex_count: usize,
}

fn parse_endpoint(tok: &str, line: usize) -> crate::Result<usize> {
    tok.parse::<usize>().map_err(|_| crate::Error::Parse {
        line,
        msg: format!("expected a vertex id, got {tok:?}"),
    })
}

/// Parses an edge list in arrival order: one `u v` pair per line,
/// `#` starts a comment, blank lines are skipped. Self-loops and repeats
/// of an already-seen edge are dropped and counted, not errors.
pub fn parse_edge_stream(input: &str) -> crate::Result<(Vec<(usize, usize)>, LoadReport)> {
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    let mut report = LoadReport::default();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_ascii_whitespace();
        let Some(a) = toks.next() else { continue };
        let Some(b) = toks.next() else {
            return Err(crate::Error::Parse {
                line,
                msg: "expected two vertex ids".into(),
            });
        };
        if let Some(extra) = toks.next() {
            return Err(crate::Error::Parse {
                line,
                msg: format!("unexpected trailing token {extra:?}"),
            });
        }
        let u = parse_endpoint(a, line)?;
        let v = parse_endpoint(b, line)?;
        report.min_vertex_count = report.min_vertex_count.max(u.max(v) + 1);
        if u == v {
            report.self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            report.duplicates += 1;
            continue;
        }
        edges.push(key);
    }
    Ok((edges, report))
}

/// Loads an edge list into a [`Graph`]. The vertex count is
/// `1 + max id seen`, or `explicit_n` when that is larger; an explicit
/// count below the required minimum is an error. Drops self-loops and
/// duplicates silently, reporting counts in the [`LoadReport`].
pub fn load_edge_list(input: &str, explicit_n: Option<usize>) -> crate::Result<(Graph, LoadReport)> {
    let (edges, report) = parse_edge_stream(input)?;
    let required = report.min_vertex_count;
    let n = match explicit_n {
        Some(given) if given < required => {
            return Err(crate::Error::Graph(GraphError::VertexCountTooSmall {
                given,
                required,
            }))
        }
        Some(given) => given,
        None => required,
    };
    let mut canon = edges;
    canon.sort_unstable();
    Ok((Graph::from_canonical(n, canon), report))
}

/// Reads a whole file through [`load_edge_list`].
pub fn load_edge_list_path(
    path: &std::path::Path,
    explicit_n: Option<usize>,
) -> crate::Result<(Graph, LoadReport)> {
    let mut text = String::new();
    let file = std::fs::File::open(path)?;
    let mut reader = std::io::BufReader::new(file);
    std::io::Read::read_to_string(&mut reader, &mut text)?;
    load_edge_list(&text, explicit_n)
}

/// One turnstile event: an edge insertion or deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Insert(usize, usize),
    Delete(usize, usize),
}

/// Parses an event log: `+ u v` inserts, `- u v` deletes, `#` comments.
pub fn parse_events(input: &str) -> crate::Result<Vec<Event>> {
    let mut events = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_ascii_whitespace();
        let Some(op) = toks.next() else { continue };
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(crate::Error::Parse {
                line,
                msg: "expected `+ u v` or `- u v`".into(),
            });
        };
        let u = parse_endpoint(a, line)?;
        let v = parse_endpoint(b, line)?;
        match op {
            "+" => events.push(Event::Insert(u, v)),
            "-" => events.push(Event::Delete(u, v)),
            other => {
                return Err(crate::Error::Parse {
                    line,
                    msg: format!("unknown event op {other:?}"),
                })
            }
        }
    }
    Ok(events)
}

/// Convenience for tests and the CLI: read a file into a string.
pub fn read_to_string(path: &std::path::Path) -> crate::Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

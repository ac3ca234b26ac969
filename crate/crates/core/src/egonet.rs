//! Radius-r egonets: BFS-induced subgraphs rooted at a center node.
//!
//! An egonet carries the parent graph's degree for every member, including
//! members on the BFS boundary whose neighbors lie outside the egonet. The
//! normalized edge weights of the Laplacian graph depend on those true
//! degrees, which the induced subgraph alone cannot supply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

const UNVISITED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Egonet {
    center: usize,
    radius: usize,
    members: Vec<usize>,
    distances: Vec<usize>,
    global_degrees: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    closed: bool,
}

/// Wire form of an [`Egonet`], suitable for collecting samples remotely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgonetRecord {
    pub center: usize,
    pub radius: usize,
    pub members: Vec<usize>,
    pub distances: Vec<usize>,
    pub global_degrees: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Egonet {
    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Global indices of the members; `members()[0]` is the center.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn distances(&self) -> &[usize] {
        &self.distances
    }

    pub fn global_degrees(&self) -> &[f64] {
        &self.global_degrees
    }

    /// Induced edges in local indices, `(a, b, w)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True when no member has a neighbor outside the egonet, i.e. the
    /// egonet is the center's whole connected component.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn to_record(&self) -> EgonetRecord {
        EgonetRecord {
            center: self.center,
            radius: self.radius,
            members: self.members.clone(),
            distances: self.distances.clone(),
            global_degrees: self.global_degrees.clone(),
            edges: self.edges.clone(),
        }
    }
}

impl Serialize for Egonet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Egonet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let record = EgonetRecord::deserialize(deserializer)?;
        Egonet::try_from(record).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<EgonetRecord> for Egonet {
    type Error = Error;

    /// Validates the structural invariants of a record collected elsewhere.
    /// Closure is inferred from degrees: a member whose induced edge weights
    /// do not account for its full degree has neighbors outside the egonet.
    fn try_from(record: EgonetRecord) -> Result<Egonet> {
        let size = record.members.len();
        let bad = |msg: String| Err(Error::Parse { line: 0, message: msg });
        if size == 0 {
            return bad("egonet has no members".into());
        }
        if record.distances.len() != size || record.global_degrees.len() != size {
            return bad("members, distances and global_degrees differ in length".into());
        }
        if record.members[0] != record.center || record.distances[0] != 0 {
            return bad("first member must be the center at distance 0".into());
        }
        if let Some(&d) = record.distances.iter().find(|&&d| d > record.radius) {
            return bad(format!("member at distance {d} exceeds radius {}", record.radius));
        }
        let mut incident = vec![0.0; size];
        let mut edges = record.edges;
        for &(a, b, w) in &edges {
            if a >= size || b >= size || a == b {
                return bad(format!("invalid local edge ({a}, {b})"));
            }
            if !(w > 0.0) || !w.is_finite() {
                return bad(format!("invalid weight {w} on local edge ({a}, {b})"));
            }
            incident[a] += w;
            incident[b] += w;
        }
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if edges.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return bad("duplicate local edge".into());
        }
        let closed = incident
            .iter()
            .zip(&record.global_degrees)
            .all(|(&s, &d)| (s - d).abs() <= 1e-9 * d.abs().max(1.0));
        Ok(Egonet {
            center: record.center,
            radius: record.radius,
            members: record.members,
            distances: record.distances,
            global_degrees: record.global_degrees,
            edges,
            closed,
        })
    }
}

/// Reusable BFS scratch space. Extracting many egonets from one graph with
/// the same extractor avoids an O(n) allocation per center.
pub struct EgonetExtractor<'g> {
    graph: &'g Graph,
    local: Vec<usize>,
}

impl<'g> EgonetExtractor<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        EgonetExtractor { graph, local: vec![UNVISITED; graph.n()] }
    }

    /// BFS from `center` with hop cutoff `radius`. Members are ordered by
    /// (distance, global index).
    pub fn extract(&mut self, center: usize, radius: usize) -> Result<Egonet> {
        let g = self.graph;
        if center >= g.n() {
            return Err(Error::Index { index: center, n: g.n() });
        }

        let mut members = vec![center];
        let mut distances = vec![0];
        self.local[center] = 0;
        let mut layer_start = 0;
        for depth in 1..=radius {
            let layer_end = members.len();
            let mut next = Vec::new();
            for pos in layer_start..layer_end {
                for &j in g.neighbors(members[pos]) {
                    if self.local[j] == UNVISITED {
                        // provisional mark; final index assigned after sorting
                        self.local[j] = 0;
                        next.push(j);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            for j in next {
                self.local[j] = members.len();
                members.push(j);
                distances.push(depth);
            }
            layer_start = layer_end;
        }

        let mut closed = true;
        let mut edges = Vec::new();
        for (a, &u) in members.iter().enumerate() {
            for (v, w) in g.adjacent(u) {
                let b = self.local[v];
                if b == UNVISITED {
                    closed = false;
                } else if a < b {
                    edges.push((a, b, w));
                }
            }
        }
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

        let global_degrees = members.iter().map(|&u| g.degree(u)).collect();
        for &u in &members {
            self.local[u] = UNVISITED;
        }

        Ok(Egonet { center, radius, members, distances, global_degrees, edges, closed })
    }
}

/// Extracts the radius-`radius` egonet around `center`.
pub fn extract_egonet(graph: &Graph, center: usize, radius: usize) -> Result<Egonet> {
    EgonetExtractor::new(graph).extract(center, radius)
}

//! Bipartite clause/variable incidence graphs and maximum matchings.
//!
//! Left vertices are clauses, right vertices are variables. Both sides are
//! re-indexed densely; the public accessors translate back to clause
//! indices and variable ids.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::ClauseSet;
use crate::solver::{predicates, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClauseVariableGraph {
    clauses: Vec<usize>,
    variables: Vec<u32>,
    adjacency: Vec<Vec<u32>>,
}

impl ClauseVariableGraph {
    /// Graph from dense adjacency lists; `adjacency[l]` holds indices into
    /// `variables`. Duplicate neighbours are dropped.
    pub fn from_adjacency(
        clauses: Vec<usize>,
        variables: Vec<u32>,
        mut adjacency: Vec<Vec<u32>>,
    ) -> Self {
        assert_eq!(clauses.len(), adjacency.len());
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            assert!(list.iter().all(|&r| (r as usize) < variables.len()));
        }
        ClauseVariableGraph {
            clauses,
            variables,
            adjacency,
        }
    }

    /// Left side = `clauses`; each is joined to the distinct members of
    /// `right_set` it contains. Right vertices are numbered in the insertion
    /// order of `right_set`.
    pub fn from_clauses<F: ClauseSet>(
        formula: &F,
        clauses: Vec<usize>,
        right_set: &VarSet,
    ) -> Self {
        let variables: Vec<u32> = right_set.order().to_vec();
        let dense: HashMap<u32, u32> = variables
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let adjacency = clauses
            .iter()
            .map(|&i| {
                let mut list: Vec<u32> = formula
                    .clause(i)
                    .iter()
                    .filter_map(|l| dense.get(&l.var()).copied())
                    .collect();
                list.sort_unstable();
                list.dedup();
                list
            })
            .collect();
        ClauseVariableGraph {
            clauses,
            variables,
            adjacency,
        }
    }

    pub fn num_left(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_right(&self) -> usize {
        self.variables.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn clause(&self, left: usize) -> usize {
        self.clauses[left]
    }

    pub fn clauses(&self) -> &[usize] {
        &self.clauses
    }

    pub fn variable(&self, right: u32) -> u32 {
        self.variables[right as usize]
    }

    pub fn variables(&self) -> &[u32] {
        &self.variables
    }

    pub fn neighbors(&self, left: usize) -> &[u32] {
        &self.adjacency[left]
    }

    pub fn has_edge(&self, left: usize, right: u32) -> bool {
        self.adjacency
            .get(left)
            .is_some_and(|l| l.binary_search(&right).is_ok())
    }

    pub fn min_left_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }
}

/// Graph joining every endangered clause to the `Z′` variables it contains.
pub fn build_incidence_graph<F: ClauseSet>(
    formula: &F,
    z: &VarSet,
    z_prime: &VarSet,
) -> ClauseVariableGraph {
    let endangered = (0..formula.num_clauses())
        .filter(|&i| predicates::is_endangered(formula, z, z_prime, i))
        .collect();
    ClauseVariableGraph::from_clauses(formula, endangered, z_prime)
}

/// A set of vertex-disjoint edges, as dense `(left, right)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pairs: Vec<(u32, u32)>,
}

impl Matching {
    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable();
        Matching { pairs }
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Matched `(clause index, variable)` pairs.
    pub fn edges(&self, graph: &ClauseVariableGraph) -> Vec<(usize, u32)> {
        self.pairs
            .iter()
            .map(|&(l, r)| (graph.clause(l as usize), graph.variable(r)))
            .collect()
    }

    pub fn covers_left(&self, graph: &ClauseVariableGraph) -> bool {
        self.pairs.len() == graph.num_left()
    }
}

/// Checks edge membership, vertex-disjointness and coverage of every left vertex.
pub fn verify_matching(graph: &ClauseVariableGraph, matching: &Matching) -> bool {
    let mut left_used = vec![false; graph.num_left()];
    let mut right_used = vec![false; graph.num_right()];
    for &(l, r) in matching.pairs() {
        let (l, ru) = (l as usize, r as usize);
        if l >= left_used.len() || ru >= right_used.len() || !graph.has_edge(l, r) {
            return false;
        }
        if std::mem::replace(&mut left_used[l], true)
            || std::mem::replace(&mut right_used[ru], true)
        {
            return false;
        }
    }
    left_used.into_iter().all(|u| u)
}

const FREE: u32 = u32::MAX;
const INF: u32 = u32::MAX;

/// Maximum-cardinality matching in `O(E·√V)`.
pub fn hopcroft_karp(graph: &ClauseVariableGraph) -> Matching {
    let nl = graph.num_left();
    let nr = graph.num_right();
    let mut mate_left = vec![FREE; nl];
    let mut mate_right = vec![FREE; nr];
    let mut dist = vec![INF; nl];
    let mut queue = VecDeque::with_capacity(nl);
    let mut next_edge = vec![0usize; nl];
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // Layer the graph from all free left vertices.
        queue.clear();
        for l in 0..nl {
            if mate_left[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut reachable_free = false;
        while let Some(l) = queue.pop_front() {
            for &r in graph.neighbors(l) {
                match mate_right[r as usize] {
                    FREE => reachable_free = true,
                    l2 => {
                        let l2 = l2 as usize;
                        if dist[l2] == INF {
                            dist[l2] = dist[l] + 1;
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        if !reachable_free {
            break;
        }

        // Vertex-disjoint shortest augmenting paths, by iterative DFS.
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..nl {
            if mate_left[root] != FREE {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&l) = stack.last() {
                let adj = graph.neighbors(l);
                if next_edge[l] == adj.len() {
                    dist[l] = INF;
                    stack.pop();
                    continue;
                }
                let r = adj[next_edge[l]];
                next_edge[l] += 1;
                match mate_right[r as usize] {
                    FREE => {
                        // Flip the path root → ... → l → r.
                        let mut r = r;
                        while let Some(l) = stack.pop() {
                            let prev = mate_left[l];
                            mate_left[l] = r;
                            mate_right[r as usize] = l as u32;
                            r = prev;
                        }
                        break;
                    }
                    l2 => {
                        let l2 = l2 as usize;
                        if dist[l2] != INF && dist[l2] == dist[l] + 1 {
                            stack.push(l2);
                        }
                    }
                }
            }
        }
    }

    Matching::from_pairs(
        mate_left
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r != FREE)
            .map(|(l, &r)| (l as u32, r))
            .collect(),
    )
}

/// A left vertex set whose neighbourhood is smaller than itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolation {
    pub clauses: Vec<usize>,
    pub variables: Vec<u32>,
}

/// Deficient set extracted from a maximum matching that leaves some left
/// vertex uncovered: the left and right vertices reachable from unmatched
/// left vertices by alternating paths. `None` when the matching covers the
/// left side.
pub fn hall_violation(graph: &ClauseVariableGraph, matching: &Matching) -> Option<HallViolation> {
    if matching.covers_left(graph) {
        return None;
    }
    let mut mate_right = vec![FREE; graph.num_right()];
    let mut matched_left = vec![false; graph.num_left()];
    for &(l, r) in matching.pairs() {
        mate_right[r as usize] = l;
        matched_left[l as usize] = true;
    }
    let mut seen_left = vec![false; graph.num_left()];
    let mut seen_right = vec![false; graph.num_right()];
    let mut queue: VecDeque<usize> = (0..graph.num_left())
        .filter(|&l| !matched_left[l])
        .collect();
    for &l in &queue {
        seen_left[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in graph.neighbors(l) {
            if std::mem::replace(&mut seen_right[r as usize], true) {
                continue;
            }
            let l2 = mate_right[r as usize];
            if l2 != FREE && !seen_left[l2 as usize] {
                seen_left[l2 as usize] = true;
                queue.push_back(l2 as usize);
            }
        }
    }
    let clauses: Vec<usize> = (0..graph.num_left())
        .filter(|&l| seen_left[l])
        .map(|l| graph.clause(l))
        .collect();
    let variables: Vec<u32> = (0..graph.num_right())
        .filter(|&r| seen_right[r])
        .map(|r| graph.variable(r as u32))
        .collect();
    debug_assert!(variables.len() < clauses.len());
    Some(HallViolation { clauses, variables })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("exhaustive matching supports at most {max} left vertices, got {got}")]
    TooManyLeft { max: usize, got: usize },
    #[error("exhaustive matching supports at most 64 right vertices, got {0}")]
    TooManyRight(usize),
}

pub const BRUTE_FORCE_MAX_LEFT: usize = 15;

/// Exact maximum matching by exhaustive search over left vertices, memoized
/// on the set of used right vertices. Test oracle for [`hopcroft_karp`].
pub fn brute_force_matching(graph: &ClauseVariableGraph) -> Result<Matching, BruteForceError> {
    if graph.num_left() > BRUTE_FORCE_MAX_LEFT {
        return Err(BruteForceError::TooManyLeft {
            max: BRUTE_FORCE_MAX_LEFT,
            got: graph.num_left(),
        });
    }
    if graph.num_right() > 64 {
        return Err(BruteForceError::TooManyRight(graph.num_right()));
    }

    fn best(
        graph: &ClauseVariableGraph,
        l: usize,
        used: u64,
        memo: &mut HashMap<(usize, u64), usize>,
    ) -> usize {
        if l == graph.num_left() {
            return 0;
        }
        if let Some(&v) = memo.get(&(l, used)) {
            return v;
        }
        let mut value = best(graph, l + 1, used, memo);
        for &r in graph.neighbors(l) {
            if used & (1 << r) == 0 {
                value = value.max(1 + best(graph, l + 1, used | (1 << r), memo));
            }
        }
        memo.insert((l, used), value);
        value
    }

    let mut memo = HashMap::new();
    let mut pairs = Vec::new();
    let mut used = 0u64;
    let mut remaining = best(graph, 0, 0, &mut memo);
    for l in 0..graph.num_left() {
        if remaining == 0 {
            break;
        }
        if best(graph, l + 1, used, &mut memo) == remaining {
            continue;
        }
        let r = graph
            .neighbors(l)
            .iter()
            .copied()
            .find(|&r| {
                used & (1 << r) == 0
                    && 1 + best(graph, l + 1, used | (1 << r), &mut memo) == remaining
            })
            .expect("an optimal choice exists");
        pairs.push((l as u32, r));
        used |= 1 << r;
        remaining -= 1;
    }
    Ok(Matching::from_pairs(pairs))
}

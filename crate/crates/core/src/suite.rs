//! The fixed instance suite the battery runs over.

use crate::error::Result;
use crate::graph::{VertexSet, WeightedGraph};
use crate::instances::{
    gen_complete, gen_cycle, gen_hypercube, gen_joined_expanders, gen_path, gen_planted_bisection, gen_stable_gadget,
};

pub const CYCLE_SIZES: [usize; 7] = [4, 8, 16, 32, 64, 128, 256];
pub const PATH_SIZES: [usize; 4] = [2, 5, 16, 64];
pub const PLANTED_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const EXPANDER_BRIDGES: [usize; 3] = [1, 2, 4];
pub const EXPANDER_SEEDS: [u64; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycle,
    Complete,
    Path,
    Hypercube,
    Planted,
    Expanders,
    Gadget,
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub name: String,
    pub family: Family,
    pub graph: WeightedGraph,
    /// Planted sides, for the planted family.
    pub planted: Option<(VertexSet, VertexSet)>,
}

impl SuiteInstance {
    fn plain(name: String, family: Family, graph: WeightedGraph) -> Self {
        SuiteInstance {
            name,
            family,
            graph,
            planted: None,
        }
    }
}

/// Every suite graph, in a fixed order.
pub fn suite() -> Result<Vec<SuiteInstance>> {
    let mut out = Vec::new();
    for n in CYCLE_SIZES {
        out.push(SuiteInstance::plain(format!("cycle-{n}"), Family::Cycle, gen_cycle(n, 1.0)?));
    }
    for n in 3..=10 {
        out.push(SuiteInstance::plain(format!("complete-{n}"), Family::Complete, gen_complete(n)?));
    }
    for n in PATH_SIZES {
        out.push(SuiteInstance::plain(format!("path-{n}"), Family::Path, gen_path(n)?));
    }
    out.push(SuiteInstance::plain("hypercube-3".into(), Family::Hypercube, gen_hypercube(3)?));
    for seed in PLANTED_SEEDS {
        let p = gen_planted_bisection(32, 0.5, 0.1, seed)?;
        let sides = (
            VertexSet::from_vertices(&p.graph, p.x.iter().copied())?,
            VertexSet::from_vertices(&p.graph, p.y.iter().copied())?,
        );
        out.push(SuiteInstance {
            name: format!("planted-32-seed{seed}"),
            family: Family::Planted,
            graph: p.graph,
            planted: Some(sides),
        });
    }
    for b in EXPANDER_BRIDGES {
        for seed in EXPANDER_SEEDS {
            out.push(SuiteInstance::plain(
                format!("expanders-16-b{b}-seed{seed}"),
                Family::Expanders,
                gen_joined_expanders(16, b, 1.0, seed)?,
            ));
        }
    }
    for n in [4, 8] {
        out.push(SuiteInstance::plain(format!("gadget-{n}"), Family::Gadget, gen_stable_gadget(n, 1.0)?));
    }
    Ok(out)
}

/// Two-coloring by breadth-first search.
pub fn is_bipartite(g: &WeightedGraph) -> bool {
    let mut color = vec![-1i8; g.n()];
    for s in 0..g.n() {
        if color[s] >= 0 {
            continue;
        }
        color[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(u, _) in g.neighbors(v) {
                if color[u] < 0 {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if color[u] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

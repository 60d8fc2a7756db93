//! Bounded decision procedure for path equivalence.
//!
//! The congruence generated by a schema's declared equivalences is explored
//! by breadth-first rewriting from both ends at once. Declared equivalences
//! are used as rewrite rules in both directions at every position of a path,
//! which is exactly closure under pre- and post-composition. The word problem
//! is undecidable in general, so a search that runs out of budget answers
//! [`Equivalence::NotProvedWithinBudget`] and never claims inequivalence.

use std::collections::{HashMap, HashSet};

use crate::error::Result;
use crate::model::schema::{ArrowId, Path, Schema, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteBudget {
    /// Maximum number of rewrite applications between the two paths.
    pub steps: usize,
    /// Intermediate paths longer than this are not explored.
    pub max_len: usize,
    /// Cap on distinct paths visited across both searches.
    pub max_states: usize,
}

impl Default for RewriteBudget {
    fn default() -> Self {
        RewriteBudget {
            steps: 64,
            max_len: 32,
            max_states: 200_000,
        }
    }
}

impl RewriteBudget {
    pub fn with_steps(steps: usize) -> Self {
        RewriteBudget {
            steps,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent { steps: usize },
    NotProvedWithinBudget,
}

impl Equivalence {
    pub fn is_equivalent(self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

struct Rule<'a> {
    from_source: VertexId,
    from: &'a [ArrowId],
    to: &'a [ArrowId],
}

/// Decides `p ≃ q` up to `budget` rewrite steps.
pub fn paths_equivalent(
    schema: &Schema,
    p: &Path,
    q: &Path,
    budget: &RewriteBudget,
) -> Result<Equivalence> {
    let pt = schema.target(p)?;
    let qt = schema.target(q)?;
    if p.source != q.source || pt != qt {
        return Ok(Equivalence::NotProvedWithinBudget);
    }
    if p.arrows == q.arrows {
        return Ok(Equivalence::Equivalent { steps: 0 });
    }

    let rules: Vec<Rule<'_>> = schema
        .equations()
        .iter()
        .flat_map(|eq| {
            [
                Rule {
                    from_source: eq.lhs.source,
                    from: &eq.lhs.arrows[..],
                    to: &eq.rhs.arrows[..],
                },
                Rule {
                    from_source: eq.rhs.source,
                    from: &eq.rhs.arrows[..],
                    to: &eq.lhs.arrows[..],
                },
            ]
        })
        .collect();

    let mut dist = [HashMap::new(), HashMap::new()];
    let mut frontier = [vec![p.arrows.clone()], vec![q.arrows.clone()]];
    dist[0].insert(p.arrows.clone(), 0usize);
    dist[1].insert(q.arrows.clone(), 0usize);
    let mut depth = [0usize, 0usize];

    while depth[0] + depth[1] < budget.steps {
        // expand the smaller non-empty frontier
        let side = match (frontier[0].is_empty(), frontier[1].is_empty()) {
            (true, true) => break,
            (true, false) => 1,
            (false, true) => 0,
            (false, false) => usize::from(frontier[1].len() < frontier[0].len()),
        };
        let other = 1 - side;
        depth[side] += 1;
        let d = depth[side];
        let mut next = Vec::new();
        let mut best: Option<usize> = None;
        for word in std::mem::take(&mut frontier[side]) {
            for succ in rewrites(schema, p.source, &word, &rules, budget.max_len) {
                if dist[side].contains_key(&succ) {
                    continue;
                }
                if let Some(&od) = dist[other].get(&succ) {
                    let total = d + od;
                    best = Some(best.map_or(total, |b: usize| b.min(total)));
                }
                dist[side].insert(succ.clone(), d);
                next.push(succ);
            }
        }
        if let Some(steps) = best {
            return Ok(Equivalence::Equivalent { steps });
        }
        if dist[0].len() + dist[1].len() > budget.max_states {
            break;
        }
        frontier[side] = next;
    }
    Ok(Equivalence::NotProvedWithinBudget)
}

fn rewrites(
    schema: &Schema,
    source: VertexId,
    word: &[ArrowId],
    rules: &[Rule<'_>],
    max_len: usize,
) -> Vec<Vec<ArrowId>> {
    let g = schema.graph();
    // vertex reached after i arrows
    let mut at = Vec::with_capacity(word.len() + 1);
    at.push(source);
    for &a in word {
        at.push(g.target(a));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rule in rules {
        let n = rule.from.len();
        if word.len() - n.min(word.len()) + rule.to.len() > max_len {
            continue;
        }
        if n > word.len() {
            continue;
        }
        for i in 0..=word.len() - n {
            if at[i] != rule.from_source || word[i..i + n] != *rule.from {
                continue;
            }
            let mut w = Vec::with_capacity(word.len() - n + rule.to.len());
            w.extend_from_slice(&word[..i]);
            w.extend_from_slice(rule.to);
            w.extend_from_slice(&word[i + n..]);
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
    }
    out
}

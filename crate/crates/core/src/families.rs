//! Backtracking search for assignments subject to functional constraints.
//!
//! Every variable ranges over a finite domain of values and every edge
//! `x -> y` with table `f` demands `value(y) = f[value(x)]`. Limits of finite
//! diagrams, morphisms between instances and typed families are all solution
//! sets of such problems.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub(crate) struct Problem<'t> {
    domains: Vec<Vec<usize>>,
    allowed: Vec<Vec<bool>>,
    edges: Vec<Vec<(usize, &'t [usize])>>,
    group: Vec<Option<usize>>,
    group_size: Vec<usize>,
}

impl<'t> Problem<'t> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable over values `0..universe` restricted to `domain`.
    pub fn var(&mut self, universe: usize, domain: Vec<usize>) -> usize {
        let mut allowed = vec![false; universe];
        for &x in &domain {
            allowed[x] = true;
        }
        self.domains.push(domain);
        self.allowed.push(allowed);
        self.edges.push(Vec::new());
        self.group.push(None);
        self.domains.len() - 1
    }

    /// A variable ranging over all of `0..universe`.
    pub fn full_var(&mut self, universe: usize) -> usize {
        self.var(universe, (0..universe).collect())
    }

    pub fn edge(&mut self, from: usize, to: usize, table: &'t [usize]) {
        self.edges[from].push((to, table));
    }

    /// Variables in the same group must take pairwise distinct values.
    pub fn distinct(&mut self, vars: &[usize], universe: usize) {
        let g = self.group_size.len();
        self.group_size.push(universe);
        for &v in vars {
            self.group[v] = Some(g);
        }
    }

    /// Calls `visit` on every solution in lexicographic order of free choices.
    ///
    /// With `cap = Some(n)` the search fails once more than `n` solutions are found.
    pub fn for_each<F>(&self, cap: Option<usize>, mut visit: F) -> Result<usize>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let n = self.domains.len();
        let mut state = State {
            value: vec![usize::MAX; n],
            used: self.group_size.iter().map(|&u| vec![false; u]).collect(),
            trail: Vec::new(),
        };
        let mut count = 0usize;
        self.search(0, &mut state, &mut |vals| {
            count += 1;
            if let Some(c) = cap {
                if count > c {
                    return Err(Error::EnumerationCap { cap: c });
                }
            }
            Ok(visit(vals).is_break())
        })?;
        Ok(count)
    }

    /// Collects all solutions.
    pub fn solutions(&self, cap: Option<usize>) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.for_each(cap, |s| {
            out.push(s.to_vec());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    pub fn count(&self, cap: Option<usize>) -> Result<usize> {
        self.for_each(cap, |_| ControlFlow::Continue(()))
    }

    pub fn first(&self) -> Option<Vec<usize>> {
        let mut out = None;
        self.for_each(None, |s| {
            out = Some(s.to_vec());
            ControlFlow::Break(())
        })
        .ok()?;
        out
    }

    fn search(
        &self,
        from: usize,
        st: &mut State,
        emit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        let mut next = from;
        while next < st.value.len() && st.value[next] != usize::MAX {
            next += 1;
        }
        if next == st.value.len() {
            return emit(&st.value);
        }
        for &x in &self.domains[next] {
            let mark = st.trail.len();
            let stop = self.assign(next, x, st) && self.search(next + 1, st, emit)?;
            self.undo(mark, st);
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn assign(&self, var: usize, x: usize, st: &mut State) -> bool {
        let mut queue = vec![(var, x)];
        while let Some((v, x)) = queue.pop() {
            if st.value[v] != usize::MAX {
                if st.value[v] != x {
                    return false;
                }
                continue;
            }
            if !self.allowed[v].get(x).copied().unwrap_or(false) {
                return false;
            }
            if let Some(g) = self.group[v] {
                if st.used[g][x] {
                    return false;
                }
                st.used[g][x] = true;
            }
            st.value[v] = x;
            st.trail.push(v);
            for &(w, table) in &self.edges[v] {
                queue.push((w, table[x]));
            }
        }
        true
    }

    fn undo(&self, mark: usize, st: &mut State) {
        while st.trail.len() > mark {
            let v = st.trail.pop().expect("trail underflow");
            if let Some(g) = self.group[v] {
                st.used[g][st.value[v]] = false;
            }
            st.value[v] = usize::MAX;
        }
    }
}

struct State {
    value: Vec<usize>,
    used: Vec<Vec<bool>>,
    trail: Vec<usize>,
}

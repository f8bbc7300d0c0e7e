//! Propositional reasoning over the boolean skeleton of hybrid formulas.
//!
//! Every maximal subformula that is not built from `true`, `~` and `&` is an
//! opaque atom. Atoms are identified up to renaming of bound nominals.

use std::collections::HashMap;

use crate::syntax::Formula;

/// Interns atoms and translates formulas to clauses (Tseitin encoding).
#[derive(Default)]
pub struct Encoder {
    atoms: HashMap<Formula, usize>,
    atom_list: Vec<Formula>,
    nvars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> i32 {
        self.nvars += 1;
        self.nvars as i32
    }

    /// Variable of an atom; interned on first use.
    pub fn atom(&mut self, f: &Formula) -> i32 {
        let key = f.alpha_normal();
        if let Some(&v) = self.atoms.get(&key) {
            return v as i32;
        }
        let v = self.fresh();
        self.atoms.insert(key, v as usize);
        self.atom_list.push(f.clone());
        v
    }

    pub fn atoms(&self) -> &[Formula] {
        &self.atom_list
    }

    /// A literal equivalent to `f` (under the added definitional clauses).
    pub fn literal(&mut self, f: &Formula) -> i32 {
        match f {
            Formula::Top => {
                let v = self.fresh();
                self.clauses.push(vec![v]);
                v
            }
            Formula::Not(a) => -self.literal(a),
            Formula::And(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                let v = self.fresh();
                self.clauses.push(vec![-v, la]);
                self.clauses.push(vec![-v, lb]);
                self.clauses.push(vec![v, -la, -lb]);
                v
            }
            _ => self.atom(f),
        }
    }

    /// Asserts `f`.
    pub fn assert(&mut self, f: &Formula) {
        let l = self.literal(f);
        self.clauses.push(vec![l]);
    }

    pub fn add_clause(&mut self, c: Vec<i32>) {
        self.clauses.push(c);
    }

    pub fn solve(&self) -> bool {
        Dpll::new(self.nvars, &self.clauses).run()
    }
}

/// Whether `f` is an instance of a propositional tautology.
pub fn is_tautology(f: &Formula) -> bool {
    let mut e = Encoder::new();
    e.assert(&Formula::not(f.clone()));
    !e.solve()
}

/// Whether the conjunction of `fs` is propositionally satisfiable.
pub fn is_satisfiable<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> bool {
    let mut e = Encoder::new();
    for f in fs {
        e.assert(f);
    }
    e.solve()
}

struct Dpll<'a> {
    clauses: &'a [Vec<i32>],
    assign: Vec<i8>,
    trail: Vec<usize>,
}

impl<'a> Dpll<'a> {
    fn new(nvars: usize, clauses: &'a [Vec<i32>]) -> Self {
        Dpll { clauses, assign: vec![0; nvars + 1], trail: Vec::new() }
    }

    fn value(&self, lit: i32) -> i8 {
        let v = self.assign[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    fn set(&mut self, lit: i32) {
        let var = lit.unsigned_abs() as usize;
        self.assign[var] = if lit > 0 { 1 } else { -1 };
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.assign[v] = 0;
        }
    }

    /// Unit propagation to fixpoint. Returns false on conflict, otherwise a
    /// branching literal (0 if every clause is satisfied).
    fn propagate(&mut self) -> Option<i32> {
        loop {
            let mut changed = false;
            let mut best: Option<(usize, i32)> = None;
            for c in self.clauses {
                let mut unassigned = 0;
                let mut last = 0;
                let mut sat = false;
                for &l in c {
                    match self.value(l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            unassigned += 1;
                            last = l;
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match unassigned {
                    0 => return None,
                    1 => {
                        self.set(last);
                        changed = true;
                    }
                    n => {
                        if best.is_none_or(|(m, _)| n < m) {
                            best = Some((n, last));
                        }
                    }
                }
            }
            if !changed {
                return Some(best.map_or(0, |(_, l)| l));
            }
        }
    }

    fn run(&mut self) -> bool {
        let mark = self.trail.len();
        let lit = match self.propagate() {
            None => {
                self.undo(mark);
                return false;
            }
            Some(0) => return true,
            Some(l) => l,
        };
        for choice in [lit, -lit] {
            let inner = self.trail.len();
            self.set(choice);
            if self.run() {
                return true;
            }
            self.undo(inner);
        }
        self.undo(mark);
        false
    }
}

//! Sort inference: every variable, register and logical is an integer, a
//! boolean or a tuple of those. Unconstrained names default to integers.

use crate::assertion::{CmpOp, Expr};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    Tuple(Vec<Sort>),
}

impl Sort {
    /// Scalar component sorts, in order.
    pub fn flatten(&self) -> Vec<Sort> {
        match self {
            Sort::Tuple(xs) => xs.iter().flat_map(|x| x.flatten()).collect(),
            s => vec![s.clone()],
        }
    }

    pub fn smt(&self) -> &'static str {
        match self {
            Sort::Bool => "Bool",
            _ => "Int",
        }
    }
}

/// Names whose sorts are tracked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Var(String),
    Reg(String, Option<usize>),
    Logical(String),
}

#[derive(Clone, Debug)]
enum Node {
    Unknown,
    Int,
    Bool,
    Tuple(Vec<usize>),
}

/// Union-find over sort variables.
#[derive(Default)]
struct Solver {
    parent: Vec<usize>,
    node: Vec<Node>,
    projections: Vec<(usize, usize, usize)>,
    conflict: Option<String>,
}

impl Solver {
    fn fresh(&mut self, n: Node) -> usize {
        self.parent.push(self.parent.len());
        self.node.push(n);
        self.parent.len() - 1
    }

    fn find(&mut self, a: usize) -> usize {
        let p = self.parent[a];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.parent[a] = r;
        r
    }

    fn unify(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let na = self.node[a].clone();
        let nb = self.node[b].clone();
        self.parent[b] = a;
        match (na, nb) {
            (Node::Unknown, n) | (n, Node::Unknown) => self.node[a] = n,
            (Node::Int, Node::Int) | (Node::Bool, Node::Bool) => {}
            (Node::Tuple(xs), Node::Tuple(ys)) if xs.len() == ys.len() => {
                for (x, y) in xs.into_iter().zip(ys) {
                    self.unify(x, y);
                }
            }
            (x, y) => {
                if self.conflict.is_none() {
                    self.conflict = Some(format!("sort mismatch: {x:?} vs {y:?}"));
                }
            }
        }
    }

    fn resolve(&mut self, a: usize, depth: usize) -> Sort {
        let r = self.find(a);
        match self.node[r].clone() {
            Node::Bool => Sort::Bool,
            Node::Tuple(xs) if depth < 8 => Sort::Tuple(xs.into_iter().map(|x| self.resolve(x, depth + 1)).collect()),
            _ => Sort::Int,
        }
    }
}

/// Sort environment for one query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortEnv {
    pub sorts: BTreeMap<Key, Sort>,
}

impl SortEnv {
    pub fn of(&self, k: &Key) -> Sort {
        self.sorts.get(k).cloned().unwrap_or(Sort::Int)
    }

    pub fn var(&self, name: &str) -> Sort {
        self.of(&Key::Var(name.to_string()))
    }
}

/// Infers sorts for all names in `exprs`, starting from `seed`.
pub fn infer(exprs: &[&Expr], seed: &SortEnv) -> Result<SortEnv, String> {
    let mut s = Solver::default();
    let mut keys: BTreeMap<Key, usize> = BTreeMap::new();
    for (k, sort) in &seed.sorts {
        let v = from_sort(&mut s, sort);
        keys.insert(k.clone(), v);
    }
    for e in exprs {
        let v = walk(e, &mut s, &mut keys);
        let b = s.fresh(Node::Bool);
        s.unify(v, b);
    }
    // Projections fix tuple arity when nothing else does.
    for _ in 0..4 {
        let projs = s.projections.clone();
        for (t, k, r) in projs {
            let root = s.find(t);
            match s.node[root].clone() {
                Node::Tuple(xs) if k < xs.len() => s.unify(xs[k], r),
                Node::Tuple(xs) => {
                    s.conflict.get_or_insert(format!("projection .{k} of a {}-tuple", xs.len()));
                }
                Node::Unknown => {
                    let arity = s
                        .projections
                        .iter()
                        .filter(|(t2, _, _)| *t2 == t)
                        .map(|(_, k2, _)| k2 + 1)
                        .max()
                        .unwrap_or(k + 1)
                        .max(2);
                    let comps: Vec<usize> = (0..arity).map(|_| s.fresh(Node::Unknown)).collect();
                    let tv = s.fresh(Node::Tuple(comps.clone()));
                    s.unify(root, tv);
                    s.unify(comps[k], r);
                }
                _ => {
                    s.conflict.get_or_insert(format!("projection .{k} of a scalar"));
                }
            }
        }
    }
    if let Some(c) = s.conflict.take() {
        return Err(c);
    }
    let mut env = SortEnv::default();
    for (k, v) in keys {
        let sort = s.resolve(v, 0);
        env.sorts.insert(k, sort);
    }
    Ok(env)
}

fn from_sort(s: &mut Solver, sort: &Sort) -> usize {
    match sort {
        Sort::Int => s.fresh(Node::Int),
        Sort::Bool => s.fresh(Node::Bool),
        Sort::Tuple(xs) => {
            let comps = xs.iter().map(|x| from_sort(s, x)).collect();
            s.fresh(Node::Tuple(comps))
        }
    }
}

fn key_var(s: &mut Solver, keys: &mut BTreeMap<Key, usize>, k: Key) -> usize {
    if let Some(v) = keys.get(&k) {
        return *v;
    }
    let v = s.fresh(Node::Unknown);
    keys.insert(k, v);
    v
}

fn walk(e: &Expr, s: &mut Solver, keys: &mut BTreeMap<Key, usize>) -> usize {
    match e {
        Expr::Bool(_) | Expr::Cv(_) => s.fresh(Node::Bool),
        Expr::Int(_) => s.fresh(Node::Int),
        Expr::Var(x, _) => key_var(s, keys, Key::Var(x.clone())),
        Expr::Reg(r) => key_var(s, keys, Key::Reg(r.name.clone(), r.thread)),
        Expr::Logical(n) => key_var(s, keys, Key::Logical(n.clone())),
        Expr::Tuple(xs) => {
            let comps = xs.iter().map(|x| walk(x, s, keys)).collect();
            s.fresh(Node::Tuple(comps))
        }
        Expr::Proj(a, k) => {
            let t = walk(a, s, keys);
            let r = s.fresh(Node::Unknown);
            s.projections.push((t, *k, r));
            r
        }
        Expr::Neg(a) | Expr::Arith(_, a, _) => {
            let int = s.fresh(Node::Int);
            for c in e.children() {
                let v = walk(c, s, keys);
                s.unify(v, int);
            }
            let _ = a;
            int
        }
        Expr::Cmp(op, a, b) => {
            let va = walk(a, s, keys);
            let vb = walk(b, s, keys);
            s.unify(va, vb);
            if !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                let int = s.fresh(Node::Int);
                s.unify(va, int);
            }
            s.fresh(Node::Bool)
        }
        Expr::Coh(x, a, b) => {
            let vx = key_var(s, keys, Key::Var(x.clone()));
            let va = walk(a, s, keys);
            let vb = walk(b, s, keys);
            s.unify(vx, va);
            s.unify(vx, vb);
            s.fresh(Node::Bool)
        }
        _ => {
            let b = s.fresh(Node::Bool);
            for c in e.children() {
                let v = walk(c, s, keys);
                s.unify(v, b);
            }
            b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_assertion;

    #[test]
    fn infers_bool_int_and_tuples() {
        let e = parse_assertion("auxP /\\ x = r1 + 1 /\\ y = (1, r2) /\\ z.1 = true").unwrap();
        let env = infer(&[&e], &SortEnv::default()).unwrap();
        assert_eq!(env.var("auxP"), Sort::Bool);
        assert_eq!(env.var("x"), Sort::Int);
        assert_eq!(env.var("y"), Sort::Tuple(vec![Sort::Int, Sort::Int]));
        assert_eq!(env.var("z"), Sort::Tuple(vec![Sort::Int, Sort::Bool]));
    }

    #[test]
    fn mismatch_is_reported() {
        let e = parse_assertion("x = 1 /\\ x = true").unwrap();
        assert!(infer(&[&e], &SortEnv::default()).is_err());
    }
}

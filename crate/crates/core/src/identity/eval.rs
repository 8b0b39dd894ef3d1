//! Structural evaluation of relational expressions over a finite algebra.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::identity::ast::{Expr, Identity};
use crate::relations::{generate, is_compatible, BinRel, Kind};

/// Values of variables.
pub type Env = BTreeMap<String, BinRel>;

/// Evaluates `e` with the symbolic count bound to `k`.
pub fn eval_expr(alg: &FiniteAlgebra, e: &Expr, env: &Env, k: Option<usize>) -> Result<BinRel> {
    Evaluator::new(alg).eval(e, env, k)
}

/// Expression evaluator that remembers generated relations, which repeat a
/// lot when one identity is evaluated under many assignments.
pub(crate) struct Evaluator<'a> {
    alg: &'a FiniteAlgebra,
    generated: RefCell<HashMap<(Kind, BinRel), BinRel>>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(alg: &'a FiniteAlgebra) -> Self {
        Evaluator {
            alg,
            generated: RefCell::new(HashMap::new()),
        }
    }

    pub(crate) fn eval(&self, e: &Expr, env: &Env, k: Option<usize>) -> Result<BinRel> {
        let n = self.alg.size();
        match e {
            Expr::Var(v) => {
                let r = env.get(v).ok_or_else(|| Error::Undeclared(v.clone()))?;
                if r.size() != n {
                    return Err(Error::SizeMismatch {
                        left: r.size(),
                        right: n,
                    });
                }
                Ok(r.clone())
            }
            Expr::Compose(parts) => {
                let mut acc = self.eval(&parts[0], env, k)?;
                for p in &parts[1..] {
                    acc = acc.compose(&self.eval(p, env, k)?)?;
                }
                Ok(acc)
            }
            Expr::Meet(parts) => {
                let mut acc = self.eval(&parts[0], env, k)?;
                for p in &parts[1..] {
                    acc = acc.meet(&self.eval(p, env, k)?)?;
                }
                Ok(acc)
            }
            Expr::Conv(e) => Ok(self.eval(e, env, k)?.converse()),
            Expr::Gen(kind, parts) => {
                let mut union = self.eval(&parts[0], env, k)?;
                for p in &parts[1..] {
                    union = union.union(&self.eval(p, env, k)?)?;
                }
                let key = (*kind, union);
                if let Some(r) = self.generated.borrow().get(&key) {
                    return Ok(r.clone());
                }
                let seed: Vec<_> = key.1.pairs().collect();
                let r = generate(self.alg, &seed, *kind)?;
                self.generated.borrow_mut().insert(key, r.clone());
                Ok(r)
            }
            Expr::Alt(a, b, c) => {
                let m = c.resolve(k).ok_or(Error::UnresolvedCount)?;
                if m == 0 {
                    return Ok(BinRel::identity(n));
                }
                let ra = self.eval(a, env, k)?;
                let rb = self.eval(b, env, k)?;
                ra.alt(&rb, m)
            }
            Expr::Pow(a, c) => {
                let m = c.resolve(k).ok_or(Error::UnresolvedCount)?;
                if m == 0 {
                    return Ok(BinRel::identity(n));
                }
                self.eval(a, env, k)?.pow(m)
            }
        }
    }
}

/// Checks that every free variable of `id` is bound to a relation of its
/// declared kind, then adds the values of defined variables.
pub fn complete_env(alg: &FiniteAlgebra, id: &Identity, env: &Env, k: Option<usize>) -> Result<Env> {
    for (name, kind) in id.free_variables() {
        let r = env.get(name).ok_or_else(|| Error::Undeclared(name.to_string()))?;
        if !is_compatible(alg, r, kind) {
            return Err(Error::KindViolation(format!("{kind} (variable `{name}`)")));
        }
    }
    add_definitions(alg, id, env, k)
}

/// Adds the values of defined variables, assuming the free ones are already
/// known to have their declared kinds.
pub(crate) fn add_definitions(alg: &FiniteAlgebra, id: &Identity, env: &Env, k: Option<usize>) -> Result<Env> {
    let mut full = env.clone();
    for d in &id.defs {
        let r = eval_expr(alg, &d.expr, &full, k)?;
        let kind = id.kind_of(&d.name).expect("validated at parse time");
        if !is_compatible(alg, &r, kind) {
            return Err(Error::KindViolation(format!(
                "{kind} (defined variable `{}`)",
                d.name
            )));
        }
        full.insert(d.name.clone(), r);
    }
    Ok(full)
}

/// Whether the side conditions hold under a completed environment.
pub fn conditions_hold(alg: &FiniteAlgebra, id: &Identity, env: &Env, k: Option<usize>) -> Result<bool> {
    for (a, b) in &id.conditions {
        if !eval_expr(alg, a, env, k)?.is_subset(&eval_expr(alg, b, env, k)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

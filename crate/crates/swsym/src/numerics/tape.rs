//! Flat evaluation tapes compiled from expressions.
//!
//! Right-hand sides are evaluated millions of times inside the integrator;
//! walking an `Expr` tree each time is wasteful. A tape is a linear program
//! over a register file: variables load from a slot vector, every node writes
//! one register. Compiled and tree evaluation agree to 1e-14 on random
//! states (checked in tests and at compile time by the figure runners).

use std::collections::BTreeMap;

use num::ToPrimitive;
use thiserror::Error;

use crate::numerics::lambert::{lambert_w, WBranch};
use crate::symkernel::{Expr, ExprNode, Func, Symbol};

#[derive(Debug, Error)]
pub enum TapeError {
    #[error("expression references `{0}` which is not a declared tape variable")]
    UnknownVariable(String),
    #[error("opaque function markers cannot be compiled")]
    Opaque,
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    LoadConst(usize), // const pool index
    LoadVar(usize),   // slot index
    Add(usize, usize),
    Mul(usize, usize),
    PowI(usize, i32),
    PowF(usize, usize),
    Call(Func, usize),
}

/// A compiled scalar expression over a fixed variable layout.
#[derive(Debug, Clone)]
pub struct Tape {
    instrs: Vec<(Instr, usize)>, // (op, destination register)
    consts: Vec<f64>,
    n_regs: usize,
    out: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TapeValue {
    Ok(f64),
    DomainError,
}

impl Tape {
    pub fn compile(e: &Expr, layout: &[Symbol]) -> Result<Tape, TapeError> {
        let slots: BTreeMap<&Symbol, usize> =
            layout.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut tape = Tape {
            instrs: Vec::new(),
            consts: Vec::new(),
            n_regs: 0,
            out: 0,
        };
        let out = tape.emit(e, &slots)?;
        tape.out = out;
        Ok(tape)
    }

    fn reg(&mut self) -> usize {
        let r = self.n_regs;
        self.n_regs += 1;
        r
    }

    fn constant(&mut self, v: f64) -> usize {
        let idx = self.consts.len();
        self.consts.push(v);
        let r = self.reg();
        self.instrs.push((Instr::LoadConst(idx), r));
        r
    }

    fn emit(&mut self, e: &Expr, slots: &BTreeMap<&Symbol, usize>) -> Result<usize, TapeError> {
        match e.node() {
            ExprNode::Num(r) => Ok(self.constant(r.to_f64().unwrap_or(f64::NAN))),
            ExprNode::Sym(s) => {
                let slot = *slots
                    .get(s)
                    .ok_or_else(|| TapeError::UnknownVariable(s.name().to_string()))?;
                let r = self.reg();
                self.instrs.push((Instr::LoadVar(slot), r));
                Ok(r)
            }
            ExprNode::Add(ts) => {
                let mut acc = self.emit(&ts[0], slots)?;
                for t in &ts[1..] {
                    let r = self.emit(t, slots)?;
                    let dst = self.reg();
                    self.instrs.push((Instr::Add(acc, r), dst));
                    acc = dst;
                }
                Ok(acc)
            }
            ExprNode::Mul(fs) => {
                let mut acc = self.emit(&fs[0], slots)?;
                for f in &fs[1..] {
                    let r = self.emit(f, slots)?;
                    let dst = self.reg();
                    self.instrs.push((Instr::Mul(acc, r), dst));
                    acc = dst;
                }
                Ok(acc)
            }
            ExprNode::Pow(b, x) => {
                let rb = self.emit(b, slots)?;
                if let Some(n) = x.as_integer() {
                    if let Ok(n32) = i32::try_from(n) {
                        let dst = self.reg();
                        self.instrs.push((Instr::PowI(rb, n32), dst));
                        return Ok(dst);
                    }
                }
                let rx = self.emit(x, slots)?;
                let dst = self.reg();
                self.instrs.push((Instr::PowF(rb, rx), dst));
                Ok(dst)
            }
            ExprNode::Call(f, a) => {
                let ra = self.emit(a, slots)?;
                let dst = self.reg();
                self.instrs.push((Instr::Call(*f, ra), dst));
                Ok(dst)
            }
            ExprNode::Opaque(_) => Err(TapeError::Opaque),
        }
    }

    /// Evaluate at a slot vector matching the compile-time layout.
    pub fn eval(&self, slots: &[f64]) -> TapeValue {
        let mut regs = vec![0.0f64; self.n_regs];
        for (op, dst) in &self.instrs {
            let v = match *op {
                Instr::LoadConst(i) => self.consts[i],
                Instr::LoadVar(i) => slots[i],
                Instr::Add(a, b) => regs[a] + regs[b],
                Instr::Mul(a, b) => regs[a] * regs[b],
                Instr::PowI(a, n) => {
                    let base = regs[a];
                    if base == 0.0 && n < 0 {
                        return TapeValue::DomainError;
                    }
                    base.powi(n)
                }
                Instr::PowF(a, b) => {
                    let base = regs[a];
                    if base < 0.0 || (base == 0.0 && regs[b] < 0.0) {
                        return TapeValue::DomainError;
                    }
                    base.powf(regs[b])
                }
                Instr::Call(f, a) => {
                    let x = regs[a];
                    match f {
                        Func::Sin => x.sin(),
                        Func::Cos => x.cos(),
                        Func::Tan => x.tan(),
                        Func::Arctan => x.atan(),
                        Func::Exp => x.exp(),
                        Func::Ln => {
                            if x <= 0.0 {
                                return TapeValue::DomainError;
                            }
                            x.ln()
                        }
                        Func::Sqrt => {
                            if x < 0.0 {
                                return TapeValue::DomainError;
                            }
                            x.sqrt()
                        }
                        Func::LambertW => match lambert_w(WBranch::Zero, x) {
                            Ok(w) => w,
                            Err(_) => return TapeValue::DomainError,
                        },
                    }
                }
            };
            // infinities propagate (the step controller rejects them); NaN is a
            // domain failure
            if v.is_nan() {
                return TapeValue::DomainError;
            }
            regs[*dst] = v;
        }
        TapeValue::Ok(regs[self.out])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::eval;

    #[test]
    fn tape_matches_tree_eval() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Symbol::param("gamma");
        let h0 = Symbol::param("H0");
        let w = Symbol::param("w");
        // c^2-like guard expression with symbolic power
        let e = {
            use crate::symkernel::Expr as E;
            E::add(vec![
                E::one(),
                E::pow(
                    E::add(vec![E::sym(h0.clone()), E::sym(w.clone()).neg()]),
                    E::add(vec![E::sym(g.clone()).neg(), E::int(-1)]),
                )
                .neg(),
            ])
        };
        let layout = vec![g.clone(), h0.clone(), w.clone()];
        let tape = Tape::compile(&e, &layout).unwrap();
        for _ in 0..50 {
            let vals = [
                rng.gen_range(0.5..3.0),
                rng.gen_range(1.5..2.5),
                rng.gen_range(-0.5..0.9),
            ];
            let mut asg = BTreeMap::new();
            asg.insert(g.clone(), vals[0]);
            asg.insert(h0.clone(), vals[1]);
            asg.insert(w.clone(), vals[2]);
            let tree = eval(&e, &asg).unwrap();
            match tape.eval(&vals) {
                TapeValue::Ok(v) => {
                    assert!((v - tree).abs() <= 1e-14 * (1.0 + tree.abs()));
                }
                TapeValue::DomainError => panic!("unexpected domain error"),
            }
        }
    }
}

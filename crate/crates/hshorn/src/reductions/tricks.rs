//! Clause gadgets shared by the generators, and exhaustive checks of what they force.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::oracle::{check_claim_on_subsets, closure_finite, ClaimReport, OracleError};
use crate::semantics::{render_model, FiniteFrame, Interval, Semantics};
use crate::syntax::{desugar, mirror, Clause, Formula, Fresh, Head, Literal, Rel};

pub fn var(name: &str) -> Literal {
    Literal::var(name)
}

pub fn dia(r: Rel, l: Literal) -> Literal {
    Literal::dia(r, l)
}

pub fn bx(r: Rel, l: Literal) -> Literal {
    Literal::boxed(r, l)
}

/// `[R](body -> head)` as a clause head.
pub fn box_head(rel: Rel, body: Vec<Literal>, head: Head) -> Head {
    Head::Modal {
        rel,
        diamond: false,
        body,
        head: Box::new(head),
    }
}

pub const HTICK: &str = "htick";
pub const HTICK_BAR: &str = "htickbar";
pub const VTICK: &str = "vtick";
pub const VTICK_BAR: &str = "vtickbar";

/// Relations whose `<R>end` guards the generating clauses of finite-model variants.
pub const GUARD_RELS: [Rel; 5] = [Rel::A, Rel::BBar, Rel::DBar, Rel::L, Rel::O];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    /// Along `E`: same end, later start.
    Right,
    /// Along `B~`: same start, later end.
    Up,
}

/// Accumulates a formula together with its fresh-name supply.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    pub formula: Formula,
    pub fresh: Fresh,
    /// Every horizontal binary implication emitted so far.
    pub bimps: Vec<Bimp>,
}

/// One `[l1 & l2 =>H l]` instance with the names of its fresh variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimp {
    pub l1: Literal,
    pub l2: Literal,
    pub l: Literal,
    pub mu1: String,
    pub mu2: String,
    pub mu: String,
    /// Emitted by [`Builder::bimp_v`]: `l` holds where `l1` and `l2` start.
    pub vertical: bool,
}

impl Builder {
    pub fn new() -> Builder {
        Builder::default()
    }

    pub fn finish(self) -> Formula {
        self.formula
    }

    pub fn init(&mut self, l: Literal) {
        self.formula.initial.push(l);
    }

    pub fn rule(&mut self, body: Vec<Literal>, head: Literal) {
        self.formula.push(body, head);
    }

    pub fn clause(&mut self, body: Vec<Literal>, head: Head) {
        self.formula.clauses.push(Clause { body, head });
    }

    /// One copy of `body -> head` per `<R>end`, with `top` dropped from the body.
    pub fn guarded(&mut self, body: Vec<Literal>, head: Head, end: &Literal) {
        for r in GUARD_RELS {
            let mut b = vec![dia(r, end.clone())];
            b.extend(body.iter().filter(|l| **l != Literal::Top).cloned());
            self.clause(b, head.clone());
        }
    }

    fn generating(&mut self, body: Vec<Literal>, head: Head, guard: Option<&Literal>) {
        match guard {
            Some(end) => self.guarded(body, head, end),
            None => self.clause(body, head),
        }
    }

    /// `[l1 & l2 =>H l]`: `l` on every interval ending where both `l1` and `l2` end.
    pub fn bimp_h(&mut self, l1: &Literal, l2: &Literal, l: &Literal) {
        let m1 = self.fresh.next_lit("bimp");
        let m2 = self.fresh.next_lit("bimp");
        let m = self.fresh.next_lit("bimp");
        let name = |l: &Literal| l.to_string();
        self.bimps.push(Bimp {
            l1: l1.clone(),
            l2: l2.clone(),
            l: l.clone(),
            mu1: name(&m1),
            mu2: name(&m2),
            mu: name(&m),
            vertical: false,
        });
        self.rule(vec![l1.clone()], dia(Rel::A, m1.clone()));
        self.rule(vec![l2.clone()], dia(Rel::A, m2.clone()));
        self.rule(vec![m2.clone(), dia(Rel::BBar, m1.clone())], Literal::Bot);
        self.rule(vec![m1.clone()], m.clone());
        self.rule(vec![m1], bx(Rel::BBar, m.clone()));
        self.rule(vec![m2], bx(Rel::B, m.clone()));
        self.rule(vec![bx(Rel::A, m)], l.clone());
    }

    /// `[l1 & l2 =>V l]`, the time-reversed image of [`Builder::bimp_h`].
    pub fn bimp_v(&mut self, l1: &Literal, l2: &Literal, l: &Literal) {
        let flip = |l: &Literal| l.map_rels(&Rel::mirror);
        let mut inner = Builder {
            fresh: std::mem::take(&mut self.fresh),
            ..Builder::default()
        };
        inner.bimp_h(&flip(l1), &flip(l2), &flip(l));
        self.fresh = inner.fresh;
        self.bimps.extend(inner.bimps.into_iter().map(|b| Bimp {
            l1: l1.clone(),
            l2: l2.clone(),
            l: l.clone(),
            vertical: true,
            ..b
        }));
        self.formula.extend(mirror(&inner.formula));
    }

    /// `[l1 & l2 =>d l]` for punctual units.
    pub fn bimp_diag(&mut self, l1: &Literal, l2: &Literal, l: &Literal) {
        let m = self.fresh.next_lit("diag");
        self.rule(vec![l1.clone()], bx(Rel::A, m.clone()));
        self.rule(vec![l2.clone()], bx(Rel::A, bx(Rel::EBar, m.clone())));
        self.rule(vec![bx(Rel::A, bx(Rel::ABar, m))], l.clone());
    }

    /// `l2` on the neighbour of every `l1` one unit further along `dir`.
    pub fn grid_succ(&mut self, dir: Dir, l1: &Literal, l2: &Literal, unit: &Literal) {
        let (step, probe) = match dir {
            Dir::Right => (Rel::E, Rel::B),
            Dir::Up => (Rel::BBar, Rel::E),
        };
        self.generating(vec![l1.clone()], Head::Lit(dia(step, l2.clone())), None);
        self.grid_succ_rest(step, probe, l1, l2, unit);
    }

    /// [`Builder::grid_succ`] with its generating clause guarded by `<R>end`.
    pub fn grid_succ_guarded(&mut self, dir: Dir, l1: &Literal, l2: &Literal, unit: &Literal, end: &Literal) {
        let (step, probe) = match dir {
            Dir::Right => (Rel::E, Rel::B),
            Dir::Up => (Rel::BBar, Rel::E),
        };
        self.guarded(vec![l1.clone()], Head::Lit(dia(step, l2.clone())), end);
        self.grid_succ_rest(step, probe, l1, l2, unit);
    }

    fn grid_succ_rest(&mut self, step: Rel, probe: Rel, l1: &Literal, l2: &Literal, unit: &Literal) {
        self.rule(vec![l1.clone(), dia(step, l1.clone())], Literal::Bot);
        self.rule(vec![l2.clone(), dia(step, l2.clone())], Literal::Bot);
        self.clause(
            vec![l1.clone()],
            box_head(step, vec![dia(step, l2.clone())], Head::Not(dia(probe, unit.clone()))),
        );
    }

    /// `[phi =>nw l]`: from `<u_i,u_j>` to `<u_{i-1},u_{j+1}>`.
    pub fn nw_next(&mut self, phi: &[Literal], l: &Literal) {
        let down = self.fresh.next_lit("nw");
        let up = self.fresh.next_lit("nw");
        let right = self.fresh.next_lit("nw");
        let left = self.fresh.next_lit("nw");
        let star = self.fresh.next_lit("nw");
        self.rule(phi.to_vec(), down.clone());
        self.rule(phi.to_vec(), bx(Rel::B, down.clone()));
        self.rule(phi.to_vec(), bx(Rel::BBar, up.clone()));
        self.rule(vec![up, bx(Rel::B, down)], star.clone());
        self.rule(vec![star.clone()], right.clone());
        self.rule(vec![star.clone()], bx(Rel::E, right.clone()));
        self.rule(vec![star], bx(Rel::EBar, left.clone()));
        self.rule(vec![left, bx(Rel::E, right)], l.clone());
    }

    /// Cover trick: every interval gets `l` or `lbar`, stable along `ext`.
    pub fn cover(&mut self, l: &Literal, lbar: &Literal, ext: Rel, sub: Rel, guard: Option<&Literal>) {
        let m = self.fresh.next_lit("cover");
        let x = self.fresh.next_lit("cover");
        let y = self.fresh.next_lit("cover");
        let c = self.fresh.next_lit("cover");
        self.generating(vec![Literal::Top], Head::Lit(dia(ext, c.clone())), guard);
        self.rule(vec![c.clone()], m.clone());
        self.rule(vec![c.clone()], dia(sub, x.clone()));
        self.rule(vec![c], dia(sub, y.clone()));
        self.rule(vec![x.clone(), y.clone()], Literal::Bot);
        for (first, second, target) in [(&y, &x, l), (&x, &y, lbar)] {
            let d1 = self.fresh.next_lit("cover");
            let d2 = self.fresh.next_lit("cover");
            self.rule(vec![first.clone(), dia(sub, second.clone())], d1.clone());
            self.rule(vec![m.clone(), dia(sub, d1)], d2.clone());
            self.rule(vec![dia(ext, d2)], target.clone());
        }
        self.rule(vec![l.clone(), lbar.clone()], Literal::Bot);
    }

    pub fn chessboard(&mut self, guard: Option<&Literal>) {
        self.cover(&var(HTICK), &var(HTICK_BAR), Rel::BBar, Rel::E, guard);
        self.cover(&var(VTICK), &var(VTICK_BAR), Rel::EBar, Rel::B, guard);
    }

    /// Successor squares: `q` fills the square next to the one of `p` along `dir`.
    pub fn succ_sq(&mut self, dir: Dir, p: &Literal, q: &Literal, guard: Option<&Literal>) {
        let (step, t, tb) = match dir {
            Dir::Right => (Rel::E, var(HTICK), var(HTICK_BAR)),
            Dir::Up => (Rel::BBar, var(VTICK), var(VTICK_BAR)),
        };
        let pbar = self.fresh.next_lit("sq");
        let qbar = self.fresh.next_lit("sq");
        self.rule(vec![p.clone(), pbar.clone()], Literal::Bot);
        self.rule(vec![q.clone(), qbar.clone()], Literal::Bot);
        self.rule(vec![q.clone(), p.clone()], Literal::Bot);
        self.rule(vec![q.clone(), dia(step, p.clone())], Literal::Bot);
        for (t, tb) in [(&t, &tb), (&tb, &t)] {
            let p1 = self.fresh.next_lit("sq");
            let q1 = self.fresh.next_lit("sq");
            let c = self.fresh.next_lit("sq");
            self.generating(vec![p.clone(), t.clone()], Head::Lit(dia(step, c.clone())), guard);
            self.rule(vec![c.clone()], q.clone());
            self.rule(vec![c], tb.clone());
            self.rule(vec![p.clone(), t.clone()], bx(step, p1.clone()));
            self.rule(vec![p1.clone(), tb.clone()], pbar.clone());
            self.rule(vec![p1.clone(), tb.clone()], bx(step, pbar.clone()));
            self.rule(vec![q.clone(), tb.clone()], bx(step, q1.clone()));
            self.rule(vec![q1.clone(), t.clone()], qbar.clone());
            self.rule(vec![q1, t.clone()], bx(step, qbar.clone()));
            let e = self.fresh.next_lit("sq");
            self.rule(vec![q.clone(), tb.clone()], e.clone());
            self.rule(vec![p1.clone(), t.clone(), dia(step, e)], p.clone());
            self.rule(vec![p1, tb.clone(), dia(step, q.clone())], q.clone());
        }
    }

    /// `p` holds on the whole square of each of its intervals.
    pub fn fill(&mut self, p: &Literal) {
        let pl = self.fresh.next_lit("fill");
        let pr = self.fresh.next_lit("fill");
        let pd = self.fresh.next_lit("fill");
        let pu = self.fresh.next_lit("fill");
        self.succ_sq(Dir::Right, &pl, p, None);
        self.succ_sq(Dir::Right, p, &pr, None);
        self.succ_sq(Dir::Up, &pd, p, None);
        self.succ_sq(Dir::Up, p, &pu, None);
    }
}

// ---------------------------------------------------------------------------
// Exhaustive verification

#[derive(Clone, Debug)]
pub struct TrickReport {
    pub name: String,
    pub base_cases: usize,
    pub models: u64,
    pub counterexample: Option<String>,
}

impl TrickReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for TrickReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds() { "ok" } else { "FAILED" };
        write!(
            f,
            "{verdict} {} ({} base cases, {} valuations)",
            self.name, self.base_cases, self.models
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, "\n{c}")?;
        }
        Ok(())
    }
}

fn iv(a: usize, b: usize) -> Interval {
    Interval::new(a, b)
}

fn all_mask(frame: &FiniteFrame) -> u64 {
    if frame.len() >= 64 {
        u64::MAX
    } else {
        (1u64 << frame.len()) - 1
    }
}

fn mask_of(frame: &FiniteFrame, set: impl IntoIterator<Item = Interval>) -> u64 {
    set.into_iter()
        .filter_map(|i| frame.index_of(i))
        .fold(0, |m, w| m | 1 << w)
}

fn complement(frame: &FiniteFrame, i: Interval) -> BTreeSet<Interval> {
    frame.intervals.iter().copied().filter(|&j| j != i).collect()
}

fn fresh_vars(f: &Formula, inputs: &[&str]) -> Vec<String> {
    f.variables().into_iter().filter(|v| !inputs.contains(&v.as_str())).collect()
}

struct Tally {
    name: String,
    base_cases: usize,
    models: u64,
    counterexample: Option<String>,
}

impl Tally {
    fn new(name: String) -> Tally {
        Tally {
            name,
            base_cases: 0,
            models: 0,
            counterexample: None,
        }
    }

    fn absorb(&mut self, case: &str, r: Result<ClaimReport, OracleError>) {
        self.base_cases += 1;
        match r {
            Ok(r) => {
                self.models += r.models_checked;
                if self.counterexample.is_none() {
                    if let Some(m) = r.counterexample {
                        self.counterexample = Some(format!("{case}\n{}", render_model(&m)));
                    }
                }
            }
            Err(e) => {
                if self.counterexample.is_none() {
                    self.counterexample = Some(format!("{case}: {e}"));
                }
            }
        }
    }

    fn report(self) -> TrickReport {
        TrickReport {
            name: self.name,
            base_cases: self.base_cases,
            models: self.models,
            counterexample: self.counterexample,
        }
    }
}

/// Same-end binary implication (or, `vertical`, same-start) on every base case of a chain.
///
/// Shrinking `l1`, `l2` and growing `l` keeps counterexamples, so singleton inputs
/// and `l` false at exactly one target cover all valuations of the inputs.
pub fn verify_bimp(sem: Semantics, vertical: bool, chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, sem);
    let mut b = Builder::new();
    if vertical {
        b.bimp_v(&var("l1"), &var("l2"), &var("l"));
    } else {
        b.bimp_h(&var("l1"), &var("l2"), &var("l"));
    }
    let f = b.finish();
    let fresh: Vec<(String, u64)> = fresh_vars(&f, &["l1", "l2", "l"])
        .into_iter()
        .map(|v| (v, all_mask(&frame)))
        .collect();
    let kind = if vertical { "V" } else { "H" };
    let mut t = Tally::new(format!("binary implication {kind} ({sem}, chain {chain})"));
    let l = var("l");
    for y in 0..chain {
        for a1 in 0..chain {
            for a2 in 0..chain {
                for a in 0..chain {
                    // horizontal: common end y, starts a1, a2, a; vertical: common start y
                    let mk = |p: usize| if vertical { (y <= p).then(|| iv(y, p)) } else { (p <= y).then(|| iv(p, y)) };
                    let (Some(i1), Some(i2), Some(target)) = (mk(a1), mk(a2), mk(a)) else {
                        continue;
                    };
                    if sem.strict && [i1, i2, target].iter().any(Interval::is_punctual) {
                        continue;
                    }
                    let fixed: BTreeMap<String, BTreeSet<Interval>> = [
                        ("l1".to_string(), [i1].into()),
                        ("l2".to_string(), [i2].into()),
                        ("l".to_string(), complement(&frame, target)),
                    ]
                    .into();
                    let w = frame.index_of(target).unwrap();
                    let r = check_claim_on_subsets(&f, &fixed, &fresh, &frame, 40, |ev, _, ext| {
                        ev.literal_mask(ext, &l).is_some_and(|m| m >> w & 1 == 1)
                    });
                    t.absorb(&format!("l1@{i1} l2@{i2}, l must hold at {target}"), r);
                }
            }
        }
    }
    t.report()
}

/// `l1 & l2` at a punctual `<n,n>` forces `l` on every `<x,n+1>`.
pub fn verify_bimp_diag(chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let mut b = Builder::new();
    b.bimp_diag(&var("l1"), &var("l2"), &var("l"));
    let f = b.finish();
    let fresh: Vec<(String, u64)> = fresh_vars(&f, &["l1", "l2", "l"])
        .into_iter()
        .map(|v| (v, all_mask(&frame)))
        .collect();
    let mut t = Tally::new(format!("diagonal binary implication (irrefl, chain {chain})"));
    let l = var("l");
    for n in 0..chain.saturating_sub(1) {
        for x in 0..=n + 1 {
            let target = iv(x, n + 1);
            let fixed: BTreeMap<String, BTreeSet<Interval>> = [
                ("l1".to_string(), [iv(n, n)].into()),
                ("l2".to_string(), [iv(n, n)].into()),
                ("l".to_string(), complement(&frame, target)),
            ]
            .into();
            let w = frame.index_of(target).unwrap();
            let r = check_claim_on_subsets(&f, &fixed, &fresh, &frame, 40, |ev, _, ext| {
                ev.literal_mask(ext, &l).is_some_and(|m| m >> w & 1 == 1)
            });
            t.absorb(&format!("l1,l2@<{n},{n}>, l must hold at {target}"), r);
        }
    }
    t.report()
}

fn nw_gadget() -> (Formula, Vec<String>) {
    let mut b = Builder::new();
    b.nw_next(&[var("phi")], &var("l"));
    let f = b.finish();
    let fresh = fresh_vars(&f, &["phi", "l"]);
    (f, fresh)
}

/// nw-next over every valuation, split at the middle variable: the clauses before
/// it and after it share no other fresh variable.
pub fn verify_nw_next(chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let (f, fresh) = nw_gadget();
    // fresh order: down, up, right, left, star
    let (down, up, right, left, star) = (&fresh[0], &fresh[1], &fresh[2], &fresh[3], &fresh[4]);
    let mentions = |c: &Clause, v: &str| {
        let mut vs = BTreeSet::new();
        for l in &c.body {
            l.vars_into(&mut vs);
        }
        if let Head::Lit(l) = &c.head {
            l.vars_into(&mut vs);
        }
        vs.contains(v)
    };
    let (lower, upper): (Vec<Clause>, Vec<Clause>) = f
        .clauses
        .iter()
        .cloned()
        .partition(|c| mentions(c, down) || mentions(c, up));
    let lower = Formula {
        initial: vec![],
        clauses: lower,
    };
    let upper = Formula {
        initial: vec![],
        clauses: upper,
    };
    let all = all_mask(&frame);
    let mut t = Tally::new(format!("nw-next (irrefl, chain {chain})"));
    for i in 1..chain {
        for j in i..chain.saturating_sub(1) {
            let target = iv(i - 1, j + 1);
            t.base_cases += 1;
            let mut found = None;
            for s in 0..=all {
                let star_set: BTreeSet<Interval> =
                    (0..frame.len()).filter(|w| s >> w & 1 == 1).map(|w| frame.intervals[w]).collect();
                let fixed_lo: BTreeMap<String, BTreeSet<Interval>> = [
                    ("phi".to_string(), [iv(i, j)].into()),
                    (star.clone(), star_set.clone()),
                ]
                .into();
                let lo = check_claim_on_subsets(
                    &lower,
                    &fixed_lo,
                    &[(down.clone(), all), (up.clone(), all)],
                    &frame,
                    40,
                    |_, _, _| false,
                );
                let fixed_hi: BTreeMap<String, BTreeSet<Interval>> =
                    [("l".to_string(), complement(&frame, target)), (star.clone(), star_set)].into();
                let hi = check_claim_on_subsets(
                    &upper,
                    &fixed_hi,
                    &[(right.clone(), all), (left.clone(), all)],
                    &frame,
                    40,
                    |_, _, _| false,
                );
                match (lo, hi) {
                    (Ok(lo), Ok(hi)) => {
                        t.models += lo.models_checked * hi.models_checked;
                        if let (Some(a), Some(b)) = (lo.counterexample, hi.counterexample) {
                            found = Some(format!("phi@<{i},{j}>, l fails at {target}\n{}{}", render_model(&a), render_model(&b)));
                            break;
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        found = Some(format!("phi@<{i},{j}>: {e}"));
                        break;
                    }
                }
            }
            if t.counterexample.is_none() {
                t.counterexample = found;
            }
        }
    }
    t.report()
}

/// nw-next through the least model (the gadget is box-Horn) on a longer chain.
pub fn verify_nw_next_least(chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let (f, _) = nw_gadget();
    let mut g = f;
    g.initial.push(var("phi"));
    let mut t = Tally::new(format!("nw-next least model (irrefl, chain {chain})"));
    for i in 1..chain {
        for j in i..chain.saturating_sub(1) {
            t.base_cases += 1;
            t.models += 1;
            let target = iv(i - 1, j + 1);
            let ok = match closure_finite(&g, &frame, iv(i, j)) {
                Ok(st) => st.has_bot() || st.holds(&var("l"), target),
                Err(_) => false,
            };
            if !ok && t.counterexample.is_none() {
                t.counterexample = Some(format!("phi@<{i},{j}> does not force l at {target}"));
            }
        }
    }
    t.report()
}

/// grid_succ over units `<u_k,u_{k+1}>` with `u = 0, gap, 2*gap, ..`; the inputs range
/// over the non-punctual intervals with endpoints in `u`.
pub fn verify_grid_succ(dir: Dir, points: usize, gap: usize) -> TrickReport {
    let chain = (points - 1) * gap + 1;
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let mut b = Builder::new();
    b.grid_succ(dir, &var("l1"), &var("l2"), &var("unit"));
    let f = inline_definitions(&desugar(&b.finish()));
    let us: Vec<usize> = (0..points).map(|k| k * gap).collect();
    let aligned: Vec<Interval> = us
        .iter()
        .flat_map(|&a| us.iter().filter(move |&&b| b > a).map(move |&b| iv(a, b)))
        .collect();
    let domain = mask_of(&frame, aligned.iter().copied());
    let units: BTreeSet<Interval> = us.windows(2).map(|w| iv(w[0], w[1])).collect();
    let fixed: BTreeMap<String, BTreeSet<Interval>> = [("unit".to_string(), units)].into();
    let vars = [("l1".to_string(), domain), ("l2".to_string(), domain)];
    let next = |p: usize| us.iter().copied().find(|&u| u > p);
    let name = match dir {
        Dir::Right => "grid_succ right",
        Dir::Up => "grid_succ up",
    };
    let mut t = Tally::new(format!("{name} (irrefl, {points} unit points, gap {gap})"));
    let r = check_claim_on_subsets(&f, &fixed, &vars, &frame, 40, |_, vals, _| {
        let (m1, m2) = (vals[0], vals[1]);
        frame.intervals.iter().enumerate().filter(|(w, _)| m1 >> w & 1 == 1).all(|(_, &i)| {
            let expected = match dir {
                Dir::Right => next(i.start).filter(|&s| s < i.end).map(|s| iv(s, i.end)),
                Dir::Up => next(i.end).map(|e| iv(i.start, e)),
            };
            let found: Vec<Interval> = aligned
                .iter()
                .copied()
                .filter(|&j| match dir {
                    Dir::Right => j.end == i.end && j.start > i.start,
                    Dir::Up => j.start == i.start && j.end > i.end,
                })
                .filter(|&j| m2 >> frame.index_of(j).unwrap() & 1 == 1)
                .collect();
            expected.is_some() && found == expected.into_iter().collect::<Vec<_>>()
        })
    });
    t.absorb("every l1 interval has exactly the next l2 interval", r);
    t.report()
}

/// `[U](unit -> [E]false) & [U]([E]false -> unit)` singles out the punctual intervals.
pub fn verify_unit_punctual(chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let mut b = Builder::new();
    b.rule(vec![var("unit")], bx(Rel::E, Literal::Bot));
    b.rule(vec![bx(Rel::E, Literal::Bot)], var("unit"));
    let f = b.finish();
    let punctual = mask_of(&frame, frame.intervals.iter().copied().filter(Interval::is_punctual));
    let mut t = Tally::new(format!("punctual units (irrefl, chain {chain})"));
    let r = check_claim_on_subsets(&f, &BTreeMap::new(), &[("unit".into(), all_mask(&frame))], &frame, 40, |_, v, _| {
        v[0] == punctual
    });
    t.absorb("unit = punctual intervals", r);
    t.report()
}

/// The box-only enumeration clauses single out the intervals `<n,n+1>`.
pub fn verify_unit_successor(chain: usize) -> TrickReport {
    let frame = FiniteFrame::new(chain, Semantics::IRREFLEXIVE);
    let f = split_heads(&unit_successor_clauses());
    let steps = mask_of(&frame, (0..chain.saturating_sub(1)).map(|n| iv(n, n + 1)));
    let mut t = Tally::new(format!("successor units (irrefl, chain {chain})"));
    let r = check_claim_on_subsets(&f, &BTreeMap::new(), &[("unit".into(), all_mask(&frame))], &frame, 40, |_, v, _| {
        v[0] == steps
    });
    t.absorb("unit = <n,n+1>", r);
    t.report()
}

/// Substitutes `l` for `p` when `l -> p` is the only clause with head `p` and `p`
/// occurs nowhere else except bare in bodies: the least `p` is then exactly `l`.
pub fn inline_definitions(f: &Formula) -> Formula {
    let mut f = f.clone();
    loop {
        let mut defs: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (k, c) in f.clauses.iter().enumerate() {
            if let Head::Lit(Literal::Var(p)) = &c.head {
                defs.entry(p.clone()).or_default().push(k);
            }
        }
        let mentions = |l: &Literal, p: &str| {
            let mut vs = BTreeSet::new();
            l.vars_into(&mut vs);
            vs.contains(p)
        };
        let candidate = defs.iter().find_map(|(p, ks)| {
            let [k] = ks[..] else { return None };
            let def = &f.clauses[k];
            let target = Literal::var(p.as_str());
            let ok = def.body.len() == 1
                && !mentions(&def.body[0], p)
                && !f.initial.iter().any(|l| mentions(l, p))
                && f.clauses.iter().enumerate().all(|(j, c)| {
                    let head_ok = match &c.head {
                        Head::Lit(h) => j == k || !mentions(h, p),
                        _ => false,
                    };
                    head_ok && c.body.iter().all(|l| *l == target || !mentions(l, p))
                });
            ok.then(|| (k, target, def.body[0].clone()))
        });
        let Some((k, p, def)) = candidate else { return f };
        f.clauses.remove(k);
        for c in &mut f.clauses {
            for l in &mut c.body {
                if *l == p {
                    *l = def.clone();
                }
            }
        }
    }
}

/// Splits conjunctive and negated heads without touching the literals.
pub fn split_heads(f: &Formula) -> Formula {
    fn go(body: &[Literal], h: &Head, out: &mut Vec<Clause>) {
        match h {
            Head::Lit(l) => out.push(Clause::new(body.to_vec(), l.clone())),
            Head::Not(l) => {
                let mut b = body.to_vec();
                b.push(l.clone());
                out.push(Clause::new(b, Literal::Bot));
            }
            Head::And(hs) => hs.iter().for_each(|h| go(body, h, out)),
            Head::Modal { .. } => panic!("modal heads need desugaring"),
        }
    }
    let mut clauses = Vec::new();
    for c in &f.clauses {
        go(&c.body, &c.head, &mut clauses);
    }
    Formula {
        initial: f.initial.clone(),
        clauses,
    }
}

pub fn unit_successor_clauses() -> Formula {
    let mut b = Builder::new();
    let unit = var("unit");
    let e_bot = bx(Rel::E, Literal::Bot);
    let e_b_bot = bx(Rel::E, bx(Rel::B, Literal::Bot));
    b.clause(
        vec![unit.clone()],
        Head::And(vec![Head::Not(e_bot.clone()), Head::Lit(e_b_bot.clone())]),
    );
    b.rule(vec![dia(Rel::E, e_bot), e_b_bot], unit);
    b.finish()
}

/// Every exhaustive gadget check at the given chain length (2 or 3).
pub fn verify_all(chain: usize) -> Vec<TrickReport> {
    let mut out = Vec::new();
    for sem in [Semantics::IRREFLEXIVE, Semantics::REFLEXIVE] {
        out.push(verify_bimp(sem, false, chain));
        out.push(verify_bimp(sem, true, chain));
    }
    out.push(verify_bimp_diag(chain));
    out.push(verify_nw_next(chain));
    out.push(verify_nw_next_least(chain + 2));
    for dir in [Dir::Right, Dir::Up] {
        out.push(verify_grid_succ(dir, 4, 1));
        out.push(verify_grid_succ(dir, 4, 2));
    }
    out.push(verify_unit_punctual(chain));
    out.push(verify_unit_successor(chain + 1));
    out
}

//! Ground truth on finite concrete frames: the closure fixpoint, canonical models
//! and exhaustive model enumeration.
//!
//! The closure here is a plain round-based fixpoint. The zone solver uses its own
//! worklist engine so the two can be compared.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::semantics::{FiniteFrame, FiniteModel, Interval};
use crate::syntax::{classify, Formula, Literal, Rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("closure needs a desugared box-Horn formula")]
    NotBoxHorn,
    #[error("seed {0} is not an interval of the frame")]
    SeedOutsideFrame(Interval),
    #[error("formula is not satisfiable at the seed")]
    Unsatisfiable,
    #[error("enumeration needs {needed} bits, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("mask evaluation supports at most 64 intervals, frame has {0}")]
    FrameTooLarge(usize),
}

/// Derived facts `literal @ interval`.
#[derive(Clone, Debug)]
pub struct LabelStore {
    pub literals: Vec<Literal>,
    index: BTreeMap<Literal, usize>,
    /// `facts[l][w]`
    facts: Vec<Vec<bool>>,
    pub worlds: Vec<Interval>,
    pub applications: usize,
}

impl LabelStore {
    pub fn holds(&self, l: &Literal, w: Interval) -> bool {
        let (Some(&li), Some(wi)) = (self.index.get(l), self.worlds.iter().position(|&x| x == w)) else {
            return false;
        };
        self.facts[li][wi]
    }

    pub fn has_bot(&self) -> bool {
        let b = self.index[&Literal::Bot];
        self.facts[b].iter().any(|&x| x)
    }

    pub fn labels_at(&self, w: Interval) -> Vec<&Literal> {
        let Some(wi) = self.worlds.iter().position(|&x| x == w) else {
            return Vec::new();
        };
        (0..self.literals.len())
            .filter(|&l| self.facts[l][wi])
            .map(|l| &self.literals[l])
            .collect()
    }

    /// Label set of every world, as literal indices.
    pub fn label_sets(&self) -> Vec<BTreeSet<usize>> {
        (0..self.worlds.len())
            .map(|w| (0..self.literals.len()).filter(|&l| self.facts[l][w]).collect())
            .collect()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.iter().map(|row| row.iter().filter(|&&b| b).count()).sum()
    }
}

struct Compiled {
    literals: Vec<Literal>,
    index: BTreeMap<Literal, usize>,
    /// `(rel, inner)` for each box literal
    boxes: Vec<(usize, Rel, usize)>,
    clauses: Vec<(Vec<usize>, usize)>,
    initial: Vec<usize>,
}

fn compile(f: &Formula) -> Result<Compiled, OracleError> {
    let info = classify(f);
    if !f.is_desugared() || !info.box_only {
        return Err(OracleError::NotBoxHorn);
    }
    let mut set = f.subliterals();
    set.insert(Literal::Top);
    set.insert(Literal::Bot);
    let literals: Vec<Literal> = set.into_iter().collect();
    let index: BTreeMap<Literal, usize> = literals.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let boxes = literals
        .iter()
        .enumerate()
        .filter_map(|(i, l)| match l {
            Literal::Boxed(r, inner) => Some((i, *r, index[inner.as_ref()])),
            _ => None,
        })
        .collect();
    let clauses = f
        .clauses
        .iter()
        .map(|c| {
            (
                c.body.iter().map(|l| index[l]).collect(),
                index[c.head_literal().unwrap()],
            )
        })
        .collect();
    let initial = f.initial.iter().map(|l| index[l]).collect();
    Ok(Compiled {
        literals,
        index,
        boxes,
        clauses,
        initial,
    })
}

#[derive(Clone, Copy)]
enum Task {
    Propagate(usize),
    Introduce(usize),
    Fire(usize),
}

fn run_closure(
    f: &Formula,
    frame: &FiniteFrame,
    seed: Interval,
    mut shuffle: Option<&mut dyn FnMut(&mut Vec<(usize, Task)>)>,
) -> Result<LabelStore, OracleError> {
    let c = compile(f)?;
    let s = frame.index_of(seed).ok_or(OracleError::SeedOutsideFrame(seed))?;
    let n = frame.len();
    let mut facts = vec![vec![false; n]; c.literals.len()];
    let top = c.index[&Literal::Top];
    facts[top] = vec![true; n];
    for &l in &c.initial {
        facts[l][s] = true;
    }
    let mut applications = 0;
    let mut tasks = Vec::new();
    for w in 0..n {
        for b in 0..c.boxes.len() {
            tasks.push((w, Task::Propagate(b)));
            tasks.push((w, Task::Introduce(b)));
        }
        for k in 0..c.clauses.len() {
            tasks.push((w, Task::Fire(k)));
        }
    }
    let mut add = |facts: &mut Vec<Vec<bool>>, l: usize, w: usize| {
        if !facts[l][w] {
            facts[l][w] = true;
            applications += 1;
            true
        } else {
            false
        }
    };
    loop {
        if let Some(sh) = shuffle.as_mut() {
            sh(&mut tasks);
        }
        let mut changed = false;
        for &(w, task) in &tasks {
            match task {
                Task::Propagate(b) => {
                    let (bl, r, inner) = c.boxes[b];
                    if facts[bl][w] {
                        for &v in frame.succ_idx(r, w) {
                            changed |= add(&mut facts, inner, v);
                        }
                    }
                }
                Task::Introduce(b) => {
                    let (bl, r, inner) = c.boxes[b];
                    if !facts[bl][w] && frame.succ_idx(r, w).iter().all(|&v| facts[inner][v]) {
                        changed |= add(&mut facts, bl, w);
                    }
                }
                Task::Fire(k) => {
                    let (body, head) = &c.clauses[k];
                    if body.iter().all(|&l| facts[l][w]) {
                        changed |= add(&mut facts, *head, w);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(LabelStore {
        literals: c.literals,
        index: c.index,
        facts,
        worlds: frame.intervals.clone(),
        applications,
    })
}

/// Least fixpoint of box propagation, box introduction and clause firing.
pub fn closure_finite(f: &Formula, frame: &FiniteFrame, seed: Interval) -> Result<LabelStore, OracleError> {
    run_closure(f, frame, seed, None)
}

/// Same fixpoint with the rule schedule reshuffled every round.
pub fn closure_finite_shuffled(
    f: &Formula,
    frame: &FiniteFrame,
    seed: Interval,
    rng: &mut impl Rng,
) -> Result<LabelStore, OracleError> {
    let mut sh = |t: &mut Vec<(usize, Task)>| t.shuffle(rng);
    run_closure(f, frame, seed, Some(&mut sh))
}

pub fn is_seed_satisfiable(f: &Formula, frame: &FiniteFrame, seed: Interval) -> Result<bool, OracleError> {
    Ok(!closure_finite(f, frame, seed)?.has_bot())
}

/// Variables read off the closure.
pub fn canonical_model_finite(f: &Formula, frame: &FiniteFrame, seed: Interval) -> Result<FiniteModel, OracleError> {
    let store = closure_finite(f, frame, seed)?;
    if store.has_bot() {
        return Err(OracleError::Unsatisfiable);
    }
    let mut m = FiniteModel::new(frame.clone());
    for v in f.variables() {
        m.valuation.insert(v, BTreeSet::new());
    }
    for (li, l) in store.literals.iter().enumerate() {
        if let Literal::Var(v) = l {
            for (w, &yes) in store.facts[li].iter().enumerate() {
                if yes {
                    m.set(v, frame.intervals[w]);
                }
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

pub const DEFAULT_CAP: usize = 24;

/// Every valuation of `vars` over `frame`, in binary counting order.
pub fn exhaustive_models<'a>(
    vars: &'a [String],
    frame: &'a FiniteFrame,
    cap: usize,
) -> Result<impl Iterator<Item = FiniteModel> + 'a, OracleError> {
    let n = frame.len();
    let bits = vars.len() * n;
    if bits > cap || bits >= 64 {
        return Err(OracleError::CapExceeded { needed: bits, cap });
    }
    Ok((0u64..1u64 << bits).map(move |code| {
        let mut m = FiniteModel::new(frame.clone());
        for (k, v) in vars.iter().enumerate() {
            let set = m.valuation.entry(v.clone()).or_default();
            for w in 0..n {
                if code >> (k * n + w) & 1 == 1 {
                    set.insert(frame.intervals[w]);
                }
            }
        }
        m
    }))
}

/// Literal extensions as bitmasks over the intervals of a frame of at most 64 intervals.
pub struct MaskEvaluator {
    n: usize,
    all: u64,
    succ: Vec<Vec<u64>>,
    nodes: Vec<Node>,
    index: BTreeMap<Literal, usize>,
    vars: Vec<String>,
    clauses: Vec<(Vec<usize>, usize)>,
    initial: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Node {
    Top,
    Bot,
    Var(Option<usize>),
    Dia(Rel, usize),
    Box(Rel, usize),
}

impl MaskEvaluator {
    /// `vars` fixes the slot order of the valuation masks. Variables outside `vars` are empty.
    pub fn new(f: &Formula, vars: &[String], frame: &FiniteFrame) -> Result<MaskEvaluator, OracleError> {
        let n = frame.len();
        if n > 64 {
            return Err(OracleError::FrameTooLarge(n));
        }
        let succ = Rel::ALL
            .iter()
            .map(|&r| {
                (0..n)
                    .map(|w| frame.succ_idx(r, w).iter().fold(0u64, |m, &v| m | 1 << v))
                    .collect()
            })
            .collect();
        // post-order, so children precede parents
        let mut order = Vec::new();
        for l in f.subliterals() {
            l.subliterals_into(&mut order);
        }
        let mut index = BTreeMap::new();
        let mut nodes = Vec::new();
        for l in order {
            if index.contains_key(&l) {
                continue;
            }
            let node = match &l {
                Literal::Top => Node::Top,
                Literal::Bot => Node::Bot,
                Literal::Var(v) => Node::Var(vars.iter().position(|x| x == v)),
                Literal::Dia(r, i) => Node::Dia(*r, index[i.as_ref()]),
                Literal::Boxed(r, i) => Node::Box(*r, index[i.as_ref()]),
            };
            index.insert(l, nodes.len());
            nodes.push(node);
        }
        let lit_head = |h: &crate::syntax::Head| match h {
            crate::syntax::Head::Lit(l) => Ok(index[l]),
            _ => Err(OracleError::NotBoxHorn),
        };
        let clauses = f
            .clauses
            .iter()
            .map(|c| Ok((c.body.iter().map(|l| index[l]).collect(), lit_head(&c.head)?)))
            .collect::<Result<_, OracleError>>()?;
        let initial = f.initial.iter().map(|l| index[l]).collect();
        Ok(MaskEvaluator {
            n,
            all: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            succ,
            nodes,
            index,
            vars: vars.to_vec(),
            clauses,
            initial,
        })
    }

    pub fn extensions(&self, vals: &[u64], out: &mut Vec<u64>) {
        out.clear();
        for node in &self.nodes {
            let m = match *node {
                Node::Top => self.all,
                Node::Bot => 0,
                Node::Var(slot) => slot.map_or(0, |s| vals[s]),
                Node::Dia(r, i) => {
                    let inner = out[i];
                    let s = &self.succ[r.index()];
                    (0..self.n).fold(0, |m, w| if s[w] & inner != 0 { m | 1 << w } else { m })
                }
                Node::Box(r, i) => {
                    let outside = !out[i];
                    let s = &self.succ[r.index()];
                    (0..self.n).fold(0, |m, w| if s[w] & outside == 0 { m | 1 << w } else { m })
                }
            };
            out.push(m);
        }
    }

    pub fn clauses_hold(&self, ext: &[u64]) -> bool {
        self.clauses.iter().all(|(body, head)| {
            let b = body.iter().fold(self.all, |m, &l| m & ext[l]);
            b & !ext[*head] == 0
        })
    }

    /// Intervals where the initial conditions hold.
    pub fn initial_mask(&self, ext: &[u64]) -> u64 {
        self.initial.iter().fold(self.all, |m, &l| m & ext[l])
    }

    pub fn literal_mask(&self, ext: &[u64], l: &Literal) -> Option<u64> {
        self.index.get(l).map(|&i| ext[i])
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClaimReport {
    pub models_checked: u64,
    pub premise_models: u64,
    pub counterexample: Option<FiniteModel>,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks `conclusion` on every valuation of `vars` (other variables fixed by `fixed`)
/// whose model satisfies every clause of `premise`.
pub fn check_claim_on_all_models(
    premise: &Formula,
    fixed: &BTreeMap<String, BTreeSet<Interval>>,
    vars: &[String],
    frame: &FiniteFrame,
    cap: usize,
    conclusion: impl Fn(&FiniteModel) -> bool,
) -> Result<ClaimReport, OracleError> {
    let n = frame.len();
    let all = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let domains: Vec<(String, u64)> = vars.iter().map(|v| (v.clone(), all)).collect();
    let slots: Vec<String> = vars.iter().chain(fixed.keys()).cloned().collect();
    check_claim_on_subsets(premise, fixed, &domains, frame, cap, |_, vals, _| {
        conclusion(&masks_to_model(frame, &slots, vals))
    })
}

/// Like [`check_claim_on_all_models`], with each variable ranging over the subsets
/// of its domain mask. The conclusion sees the valuation masks (free variables
/// first, then the fixed ones in name order) and the literal extensions.
pub fn check_claim_on_subsets(
    premise: &Formula,
    fixed: &BTreeMap<String, BTreeSet<Interval>>,
    vars: &[(String, u64)],
    frame: &FiniteFrame,
    cap: usize,
    conclusion: impl Fn(&MaskEvaluator, &[u64], &[u64]) -> bool,
) -> Result<ClaimReport, OracleError> {
    let positions: Vec<Vec<u32>> = vars
        .iter()
        .map(|(_, d)| (0..64).filter(|b| d >> b & 1 == 1).collect())
        .collect();
    let bits: usize = positions.iter().map(Vec::len).sum();
    if bits > cap || bits >= 64 {
        return Err(OracleError::CapExceeded { needed: bits, cap });
    }
    let slots: Vec<String> = vars.iter().map(|(v, _)| v.clone()).chain(fixed.keys().cloned()).collect();
    let ev = MaskEvaluator::new(premise, &slots, frame)?;
    let mut vals = vec![0u64; slots.len()];
    for (k, set) in fixed.values().enumerate() {
        vals[vars.len() + k] = set.iter().filter_map(|&i| frame.index_of(i)).fold(0, |m, w| m | 1 << w);
    }
    let mut report = ClaimReport::default();
    let mut ext = Vec::new();
    for code in 0u64..1u64 << bits {
        let mut c = code;
        for (k, pos) in positions.iter().enumerate() {
            let mut m = 0u64;
            for &b in pos {
                m |= (c & 1) << b;
                c >>= 1;
            }
            vals[k] = m;
        }
        report.models_checked += 1;
        ev.extensions(&vals, &mut ext);
        if !ev.clauses_hold(&ext) {
            continue;
        }
        report.premise_models += 1;
        if !conclusion(&ev, &vals, &ext) {
            report.counterexample = Some(masks_to_model(frame, &slots, &vals));
            break;
        }
    }
    Ok(report)
}

pub fn masks_to_model(frame: &FiniteFrame, vars: &[String], vals: &[u64]) -> FiniteModel {
    let mut m = FiniteModel::new(frame.clone());
    for (v, &mask) in vars.iter().zip(vals) {
        let set = m.valuation.entry(v.clone()).or_default();
        for w in 0..frame.len() {
            if mask >> w & 1 == 1 {
                set.insert(frame.intervals[w]);
            }
        }
    }
    m
}

/// Brute-force satisfiability at `seed`: some valuation of the formula's variables satisfies it.
pub fn exhaustive_seed_satisfiable(
    f: &Formula,
    frame: &FiniteFrame,
    seed: Interval,
    cap: usize,
) -> Result<bool, OracleError> {
    let vars: Vec<String> = f.variables().into_iter().collect();
    let bits = vars.len() * frame.len();
    if bits > cap || bits >= 64 {
        return Err(OracleError::CapExceeded { needed: bits, cap });
    }
    let s = frame.index_of(seed).ok_or(OracleError::SeedOutsideFrame(seed))?;
    let ev = MaskEvaluator::new(f, &vars, frame)?;
    let n = frame.len();
    let mask = (1u64 << n) - 1;
    let mut vals = vec![0u64; vars.len()];
    let mut ext = Vec::new();
    for code in 0u64..1u64 << bits {
        for (k, v) in vals.iter_mut().enumerate() {
            *v = code >> (k * n) & mask;
        }
        ev.extensions(&vals, &mut ext);
        if ev.clauses_hold(&ext) && ev.initial_mask(&ext) >> s & 1 == 1 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Bounds for [`random_box_horn`].
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub vars: usize,
    pub clauses: usize,
    pub depth: usize,
}

impl Default for RandomShape {
    fn default() -> RandomShape {
        RandomShape {
            vars: 6,
            clauses: 10,
            depth: 3,
        }
    }
}

fn random_literal(rng: &mut impl Rng, shape: RandomShape, depth: usize) -> Literal {
    if depth == 0 || rng.gen_bool(0.4) {
        match rng.gen_range(0..shape.vars + 2) {
            0 => Literal::Top,
            1 => Literal::Bot,
            i => Literal::var(format!("p{}", i - 2)),
        }
    } else {
        let r = Rel::ALL[rng.gen_range(0..Rel::ALL.len())];
        Literal::boxed(r, random_literal(rng, shape, depth - 1))
    }
}

/// A box-Horn formula with one or two initial literals and up to `shape.clauses` clauses.
pub fn random_box_horn(rng: &mut impl Rng, shape: RandomShape) -> Formula {
    let mut f = Formula::default();
    for _ in 0..rng.gen_range(1..=2) {
        f.initial.push(random_literal(rng, shape, shape.depth));
    }
    for _ in 0..rng.gen_range(1..=shape.clauses.max(1)) {
        let body = (0..rng.gen_range(1..=3))
            .map(|_| random_literal(rng, shape, shape.depth))
            .collect();
        f.push(body, random_literal(rng, shape, shape.depth));
    }
    f
}

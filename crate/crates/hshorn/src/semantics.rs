//! Interval frames over finite chains and the truth relation on explicit models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Clause, Formula, Head, Literal, Rel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Semantics {
    /// Every `<` in the relation definitions becomes `<=`.
    pub reflexive: bool,
    /// Punctual intervals are excluded from the frame.
    pub strict: bool,
}

impl Semantics {
    pub const IRREFLEXIVE: Semantics = Semantics {
        reflexive: false,
        strict: false,
    };
    pub const REFLEXIVE: Semantics = Semantics {
        reflexive: true,
        strict: false,
    };

    pub fn new(reflexive: bool, strict: bool) -> Semantics {
        Semantics { reflexive, strict }
    }

    pub fn flavor_name(&self) -> &'static str {
        if self.reflexive {
            "refl"
        } else {
            "irrefl"
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.flavor_name())?;
        if self.strict {
            write!(f, ",strict")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Interval {
        assert!(start <= end, "interval <{start},{end}> is reversed");
        Interval { start, end }
    }

    pub fn is_punctual(&self) -> bool {
        self.start == self.end
    }

    /// Image under time reversal on a chain of `size` points.
    pub fn mirror(&self, size: usize) -> Interval {
        Interval::new(size - 1 - self.end, size - 1 - self.start)
    }

    /// Parses `(x,y)` or `<x,y>`.
    pub fn parse(text: &str) -> Option<Interval> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .or_else(|| t.strip_prefix('<').and_then(|s| s.strip_suffix('>')))?;
        let (a, b) = inner.split_once(',')?;
        let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        (a <= b).then_some(Interval { start: a, end: b })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.end)
    }
}

/// Whether `i R j` under the given flavor.
pub fn relation_holds(r: Rel, i: Interval, j: Interval, s: Semantics) -> bool {
    let lt = |a: usize, b: usize| if s.reflexive { a <= b } else { a < b };
    let (x1, y1, x2, y2) = (i.start, i.end, j.start, j.end);
    match r {
        Rel::A => y1 == x2 && lt(x2, y2),
        Rel::B => x1 == x2 && lt(y2, y1),
        Rel::E => lt(x1, x2) && y1 == y2,
        Rel::D => lt(x1, x2) && lt(y2, y1),
        Rel::L => lt(y1, x2),
        Rel::O => lt(x1, x2) && lt(x2, y1) && lt(y1, y2),
        Rel::ABar => y2 == x1 && lt(x2, y2),
        Rel::BBar => x1 == x2 && lt(y1, y2),
        Rel::EBar => lt(x2, x1) && y1 == y2,
        Rel::DBar => lt(x2, x1) && lt(y1, y2),
        Rel::LBar => lt(y2, x1),
        Rel::OBar => lt(x2, x1) && lt(x1, y2) && lt(y2, y1),
    }
}

/// All intervals of a finite chain `0..size` with precomputed successor lists.
#[derive(Clone, Debug)]
pub struct FiniteFrame {
    pub size: usize,
    pub semantics: Semantics,
    pub intervals: Vec<Interval>,
    index: Vec<Option<usize>>,
    succ: Vec<Vec<Vec<usize>>>,
}

impl FiniteFrame {
    pub fn new(size: usize, semantics: Semantics) -> FiniteFrame {
        assert!(size > 0, "empty chain");
        let mut intervals = Vec::new();
        let mut index = vec![None; size * size];
        for x in 0..size {
            for y in x..size {
                if semantics.strict && x == y {
                    continue;
                }
                index[x * size + y] = Some(intervals.len());
                intervals.push(Interval::new(x, y));
            }
        }
        let succ = Rel::ALL
            .iter()
            .map(|&r| {
                intervals
                    .iter()
                    .map(|&i| {
                        (0..intervals.len())
                            .filter(|&k| relation_holds(r, i, intervals[k], semantics))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FiniteFrame {
            size,
            semantics,
            intervals,
            index,
            succ,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn index_of(&self, i: Interval) -> Option<usize> {
        if i.end >= self.size {
            return None;
        }
        self.index[i.start * self.size + i.end]
    }

    pub fn contains(&self, i: Interval) -> bool {
        self.index_of(i).is_some()
    }

    /// Successor indices of interval index `w`.
    pub fn succ_idx(&self, r: Rel, w: usize) -> &[usize] {
        &self.succ[r.index()][w]
    }

    pub fn successors(&self, i: Interval, r: Rel) -> Vec<Interval> {
        match self.index_of(i) {
            Some(w) => self.succ_idx(r, w).iter().map(|&k| self.intervals[k]).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub frame: FiniteFrame,
    pub valuation: BTreeMap<String, BTreeSet<Interval>>,
}

impl FiniteModel {
    pub fn new(frame: FiniteFrame) -> FiniteModel {
        FiniteModel {
            frame,
            valuation: BTreeMap::new(),
        }
    }

    pub fn holds_var(&self, v: &str, i: Interval) -> bool {
        self.valuation.get(v).is_some_and(|s| s.contains(&i))
    }

    pub fn set(&mut self, v: &str, i: Interval) {
        assert!(self.frame.contains(i), "{i} outside the frame");
        self.valuation.entry(v.to_string()).or_default().insert(i);
    }
}

pub fn eval_literal(m: &FiniteModel, i: Interval, l: &Literal) -> bool {
    match l {
        Literal::Top => true,
        Literal::Bot => false,
        Literal::Var(v) => m.holds_var(v, i),
        Literal::Dia(r, inner) => m.frame.successors(i, *r).into_iter().any(|j| eval_literal(m, j, inner)),
        Literal::Boxed(r, inner) => m.frame.successors(i, *r).into_iter().all(|j| eval_literal(m, j, inner)),
    }
}

fn eval_head(m: &FiniteModel, i: Interval, h: &Head) -> bool {
    match h {
        Head::Lit(l) => eval_literal(m, i, l),
        Head::Not(l) => !eval_literal(m, i, l),
        Head::And(hs) => hs.iter().all(|h| eval_head(m, i, h)),
        Head::Modal {
            rel,
            diamond,
            body,
            head,
        } => {
            let mut it = m.frame.successors(i, *rel).into_iter();
            let holds = |j: Interval| !body.iter().all(|l| eval_literal(m, j, l)) || eval_head(m, j, head);
            if *diamond {
                it.any(|j| body.iter().all(|l| eval_literal(m, j, l)) && eval_head(m, j, head))
            } else {
                it.all(holds)
            }
        }
    }
}

/// A clause instance at one interval.
pub fn eval_clause_at(m: &FiniteModel, i: Interval, c: &Clause) -> bool {
    !c.body.iter().all(|l| eval_literal(m, i, l)) || eval_head(m, i, &c.head)
}

/// `[U]`-clauses hold at every interval of the frame.
pub fn eval_clause(m: &FiniteModel, c: &Clause) -> bool {
    m.frame.intervals.iter().all(|&i| eval_clause_at(m, i, c))
}

pub fn eval(m: &FiniteModel, i: Interval, f: &Formula) -> bool {
    f.initial.iter().all(|l| eval_literal(m, i, l)) && f.clauses.iter().all(|c| eval_clause(m, c))
}

/// First interval (lexicographic) at which the model satisfies `f`.
pub fn model_satisfies(m: &FiniteModel, f: &Formula) -> Option<Interval> {
    if !f.clauses.iter().all(|c| eval_clause(m, c)) {
        return None;
    }
    m.frame
        .intervals
        .iter()
        .copied()
        .find(|&i| f.initial.iter().all(|l| eval_literal(m, i, l)))
}

// ---------------------------------------------------------------------------
// Model files

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFileError {
    #[error("line {line}: {msg}")]
    Bad { line: usize, msg: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

/// A model file: the model plus an optional seed and an optional window.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub model: FiniteModel,
    pub seed: Option<Interval>,
    /// Clause instances are checked only at intervals with both ends among these points.
    pub window: Option<Vec<usize>>,
}

impl ModelFile {
    pub fn worlds(&self) -> Vec<Interval> {
        let f = &self.model.frame;
        match &self.window {
            None => f.intervals.clone(),
            Some(pts) => f
                .intervals
                .iter()
                .copied()
                .filter(|i| pts.contains(&i.start) && pts.contains(&i.end))
                .collect(),
        }
    }
}

/// Outcome of checking a formula on a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalReport {
    /// Interval where the initial conditions hold, if one was found.
    pub witness: Option<Interval>,
    pub checked: usize,
    /// `(clause index, world)` of every failed clause instance.
    pub failures: Vec<(usize, Interval)>,
}

impl EvalReport {
    pub fn holds(&self) -> bool {
        self.witness.is_some() && self.failures.is_empty()
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds() { "HOLDS" } else { "FAILS" };
        write!(f, "{verdict} checked={} failed={}", self.checked, self.failures.len())?;
        match self.witness {
            Some(w) => write!(f, " at={w}"),
            None => write!(f, " at=none"),
        }
    }
}

/// Checks every clause at every window world, and the initial conditions at `at`,
/// else at the file's seed, else at the first window world where they hold.
pub fn check_model_file(f: &Formula, mf: &ModelFile, at: Option<Interval>) -> EvalReport {
    let m = &mf.model;
    let worlds = mf.worlds();
    let mut failures = Vec::new();
    for (k, c) in f.clauses.iter().enumerate() {
        for &w in &worlds {
            if !eval_clause_at(m, w, c) {
                failures.push((k, w));
            }
        }
    }
    let initial_at = |w: Interval| m.frame.contains(w) && f.initial.iter().all(|l| eval_literal(m, w, l));
    let witness = match at.or(mf.seed) {
        Some(w) => initial_at(w).then_some(w),
        None => worlds.iter().copied().find(|&w| initial_at(w)),
    };
    EvalReport {
        witness,
        checked: f.clauses.len() * worlds.len(),
        failures,
    }
}

pub fn parse_model(text: &str) -> Result<FiniteModel, ModelFileError> {
    parse_model_file(text).map(|mf| mf.model)
}

pub fn parse_model_file(text: &str) -> Result<ModelFile, ModelFileError> {
    let mut seed = None;
    let mut window: Option<(usize, Vec<usize>)> = None;
    let mut size = None;
    let mut reflexive = None;
    let mut strict = false;
    let mut vals: Vec<(usize, String, Vec<Interval>)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let bad = |msg: String| ModelFileError::Bad { line, msg };
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| bad("expected `key: value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        if key == "order" {
            let n = value
                .strip_prefix("chain")
                .and_then(|s| s.trim().parse::<usize>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| bad(format!("bad order `{value}`")))?;
            size = Some(n);
        } else if key == "semantics" {
            reflexive = Some(match value {
                "refl" => true,
                "irrefl" => false,
                _ => return Err(bad(format!("bad semantics `{value}`"))),
            });
        } else if key == "strict" {
            strict = match value {
                "true" => true,
                "false" => false,
                _ => return Err(bad(format!("bad strict flag `{value}`"))),
            };
        } else if key == "seed" {
            seed = Some((line, Interval::parse(value).ok_or_else(|| bad(format!("bad interval `{value}`")))?));
        } else if key == "window" {
            let pts = value
                .split_whitespace()
                .map(|p| p.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad window `{value}`")))?;
            window = Some((line, pts));
        } else if let Some(name) = key.strip_prefix("val ") {
            let name = name.trim();
            if !valid_var(name) {
                return Err(bad(format!("bad variable `{name}`")));
            }
            vals.push((line, name.to_string(), parse_intervals(value).map_err(bad)?));
        } else {
            return Err(bad(format!("unknown key `{key}`")));
        }
    }
    let size = size.ok_or(ModelFileError::Missing("order"))?;
    let reflexive = reflexive.ok_or(ModelFileError::Missing("semantics"))?;
    let mut m = FiniteModel::new(FiniteFrame::new(size, Semantics::new(reflexive, strict)));
    for (line, name, ivs) in vals {
        let set = m.valuation.entry(name).or_default();
        for i in ivs {
            if !m.frame.contains(i) {
                return Err(ModelFileError::Bad {
                    line,
                    msg: format!("interval {i} outside the frame"),
                });
            }
            set.insert(i);
        }
    }
    if let Some((line, i)) = seed {
        if !m.frame.contains(i) {
            return Err(ModelFileError::Bad {
                line,
                msg: format!("seed {i} outside the frame"),
            });
        }
    }
    if let Some((line, pts)) = &window {
        if let Some(p) = pts.iter().find(|&&p| p >= size) {
            return Err(ModelFileError::Bad {
                line: *line,
                msg: format!("window point {p} outside the chain"),
            });
        }
    }
    Ok(ModelFile {
        model: m,
        seed: seed.map(|(_, i)| i),
        window: window.map(|(_, p)| p),
    })
}

fn valid_var(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_intervals(text: &str) -> Result<Vec<Interval>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let close = rest.find(')').ok_or_else(|| format!("unterminated interval in `{rest}`"))?;
        let piece = &rest[..=close];
        out.push(Interval::parse(piece).ok_or_else(|| format!("bad interval `{piece}`"))?);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

pub fn render_model(m: &FiniteModel) -> String {
    let mut s = format!(
        "order: chain {}\nsemantics: {}\nstrict: {}\n",
        m.frame.size,
        m.frame.semantics.flavor_name(),
        m.frame.semantics.strict
    );
    for (v, set) in &m.valuation {
        s.push_str(&format!("val {v}:"));
        for i in set {
            s.push_str(&format!(" {i}"));
        }
        s.push('\n');
    }
    s
}

pub fn render_model_file(mf: &ModelFile) -> String {
    let mut s = render_model(&mf.model);
    if let Some(i) = mf.seed {
        s.push_str(&format!("seed: {i}\n"));
    }
    if let Some(pts) = &mf.window {
        let pts: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
        s.push_str(&format!("window: {}\n", pts.join(" ")));
    }
    s
}

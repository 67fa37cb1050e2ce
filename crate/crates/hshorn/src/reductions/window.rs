//! Finite prefixes of the intended models of the reductions, and a three-valued
//! check of a formula on such a prefix.
//!
//! A prefix fixes the valuation of every interval inside `0..size`. Successors along
//! `A`, `B~`, `D~`, `L` and `O` may lie beyond it, so a box along one of them is
//! never known to be true and a diamond never known to be false unless a witness
//! inside the prefix decides it. Clause instances whose value stays open are skipped.
//! A two-sided prefix is a window of an order without a least point: the mirrored
//! relations are open as well.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::generators::{gen_core_irreflexive_traced, gen_diamond_horn, gen_pspace_core_traced, GenError, GenOptions};
use super::tm::{halting_time, simulate, Cell, Configuration, Convention, TmError, TuringMachine};
use super::tricks::{Bimp, GUARD_RELS};
use crate::semantics::{FiniteFrame, FiniteModel, Interval, Semantics};
use crate::syntax::{Formula, Head, Literal, Rel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Φ_A on `cells` tape cells; units `<2n,2n+2>`.
    PspaceCore { cells: usize, reflexive: bool },
    /// Ψ_A under the irreflexive semantics; units `<2n,2n+2>`.
    DiamondHorn,
    /// The core encoding under the irreflexive semantics; units `<2n+2,2n+4>`.
    CoreIrrefl,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("the window must contain at least one unit")]
    EmptyWindow,
    #[error("the machine halts after {0} configurations, inside the window")]
    Halts(usize),
    #[error(transparent)]
    Tm(#[from] TmError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// A materialized prefix of an intended model together with the formula it is built for.
#[derive(Clone, Debug)]
pub struct SoundnessModel {
    pub formula: Formula,
    pub model: FiniteModel,
    pub seed: Interval,
    /// Worlds ending at or before this point are checked.
    pub window_end: usize,
    pub two_sided: bool,
}

impl SoundnessModel {
    /// Removes one fact; returns whether it was present.
    pub fn drop_fact(&mut self, v: &str, i: Interval) -> bool {
        self.model.valuation.get_mut(v).is_some_and(|s| s.remove(&i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum K3 {
    False,
    Unknown,
    True,
}

impl K3 {
    fn from_bool(b: bool) -> K3 {
        if b {
            K3::True
        } else {
            K3::False
        }
    }

    fn not(self) -> K3 {
        match self {
            K3::False => K3::True,
            K3::Unknown => K3::Unknown,
            K3::True => K3::False,
        }
    }

    fn implies(self, other: K3) -> K3 {
        self.not().max(other)
    }
}

/// Whether successors along `r` can lie outside the prefix.
pub fn is_open(r: Rel, two_sided: bool) -> bool {
    GUARD_RELS.contains(&r) || two_sided && GUARD_RELS.contains(&r.mirror())
}

/// Three-valued truth of literals on a prefix, memoized per literal.
pub struct PrefixEvaluator<'a> {
    model: &'a FiniteModel,
    two_sided: bool,
    tables: HashMap<Literal, Rc<Vec<K3>>>,
}

impl<'a> PrefixEvaluator<'a> {
    pub fn new(model: &'a FiniteModel, two_sided: bool) -> PrefixEvaluator<'a> {
        PrefixEvaluator {
            model,
            two_sided,
            tables: HashMap::new(),
        }
    }

    fn frame(&self) -> &'a FiniteFrame {
        &self.model.frame
    }

    pub fn table(&mut self, l: &Literal) -> Rc<Vec<K3>> {
        if let Some(t) = self.tables.get(l) {
            return t.clone();
        }
        let frame = self.frame();
        let n = frame.len();
        let t: Vec<K3> = match l {
            Literal::Top => vec![K3::True; n],
            Literal::Bot => vec![K3::False; n],
            Literal::Var(v) => {
                let set = self.model.valuation.get(v);
                frame
                    .intervals
                    .iter()
                    .map(|i| K3::from_bool(set.is_some_and(|s| s.contains(i))))
                    .collect()
            }
            Literal::Dia(r, inner) => {
                let it = self.table(inner);
                (0..n)
                    .map(|w| {
                        let best = frame.succ_idx(*r, w).iter().map(|&k| it[k]).max().unwrap_or(K3::False);
                        if is_open(*r, self.two_sided) {
                            best.max(K3::Unknown)
                        } else {
                            best
                        }
                    })
                    .collect()
            }
            Literal::Boxed(r, inner) => {
                let it = self.table(inner);
                (0..n)
                    .map(|w| {
                        let worst = frame.succ_idx(*r, w).iter().map(|&k| it[k]).min().unwrap_or(K3::True);
                        if is_open(*r, self.two_sided) {
                            worst.min(K3::Unknown)
                        } else {
                            worst
                        }
                    })
                    .collect()
            }
        };
        let t = Rc::new(t);
        self.tables.insert(l.clone(), t.clone());
        t
    }

    pub fn literal(&mut self, l: &Literal, w: usize) -> K3 {
        self.table(l)[w]
    }

    fn body(&mut self, body: &[Literal], w: usize) -> K3 {
        let mut acc = K3::True;
        for l in body {
            acc = acc.min(self.literal(l, w));
            if acc == K3::False {
                break;
            }
        }
        acc
    }

    pub fn head(&mut self, h: &Head, w: usize) -> K3 {
        match h {
            Head::Lit(l) => self.literal(l, w),
            Head::Not(l) => self.literal(l, w).not(),
            Head::And(hs) => hs.iter().map(|h| self.head(h, w)).min().unwrap_or(K3::True),
            Head::Modal {
                rel,
                diamond,
                body,
                head,
            } => {
                let frame = self.frame();
                let vals: Vec<K3> = frame
                    .succ_idx(*rel, w)
                    .iter()
                    .map(|&k| {
                        let b = self.body(body, k);
                        if *diamond {
                            b.min(self.head(head, k))
                        } else if b == K3::False {
                            K3::True
                        } else {
                            b.implies(self.head(head, k))
                        }
                    })
                    .collect();
                if *diamond {
                    let best = vals.into_iter().max().unwrap_or(K3::False);
                    if is_open(*rel, self.two_sided) {
                        best.max(K3::Unknown)
                    } else {
                        best
                    }
                } else {
                    let worst = vals.into_iter().min().unwrap_or(K3::True);
                    if is_open(*rel, self.two_sided) {
                        worst.min(K3::Unknown)
                    } else {
                        worst
                    }
                }
            }
        }
    }

    /// Value of the clause instance at world `w`.
    pub fn clause(&mut self, body: &[Literal], head: &Head, w: usize) -> K3 {
        let b = self.body(body, w);
        if b == K3::False {
            return K3::True;
        }
        b.implies(self.head(head, w))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Index into the initial literals or the clauses.
    pub index: usize,
    pub initial: bool,
    pub world: Interval,
    pub text: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.initial { "initial" } else { "clause" };
        write!(f, "{kind} #{} at {}: {}", self.index, self.world, self.text)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WindowReport {
    pub passed: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
}

impl WindowReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for WindowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} passed={} failed={} skipped={}",
            if self.holds() { "WINDOW-OK" } else { "WINDOW-FAIL" },
            self.passed,
            self.failures.len(),
            self.skipped
        )?;
        for x in &self.failures {
            writeln!(f, "  {x}")?;
        }
        Ok(())
    }
}

/// Checks the initial literals at the seed and every clause at every world ending by `window_end`.
pub fn check_window(sm: &SoundnessModel, f: &Formula) -> WindowReport {
    check_prefix(&sm.model, sm.seed, sm.window_end, sm.two_sided, f)
}

/// [`check_window`] on a bare prefix.
pub fn check_prefix(model: &FiniteModel, seed: Interval, window_end: usize, two_sided: bool, f: &Formula) -> WindowReport {
    let mut ev = PrefixEvaluator::new(model, two_sided);
    let mut report = WindowReport::default();
    let tally = |report: &mut WindowReport, v: K3, failure: Failure| match v {
        K3::True => report.passed += 1,
        K3::Unknown => report.skipped += 1,
        K3::False => report.failures.push(failure),
    };
    if let Some(s) = model.frame.index_of(seed) {
        for (k, l) in f.initial.iter().enumerate() {
            let v = ev.literal(l, s);
            tally(
                &mut report,
                v,
                Failure {
                    index: k,
                    initial: true,
                    world: seed,
                    text: l.to_string(),
                },
            );
        }
    } else {
        report.skipped += f.initial.len();
    }
    let worlds: Vec<usize> = (0..model.frame.len())
        .filter(|&w| model.frame.intervals[w].end <= window_end)
        .collect();
    for (k, c) in f.clauses.iter().enumerate() {
        for &w in &worlds {
            let v = ev.clause(&c.body, &c.head, w);
            tally(
                &mut report,
                v,
                Failure {
                    index: k,
                    initial: false,
                    world: model.frame.intervals[w],
                    text: c.to_string(),
                },
            );
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Constructions

struct Valuation {
    size: usize,
    facts: BTreeMap<String, BTreeSet<Interval>>,
}

impl Valuation {
    fn new(size: usize) -> Valuation {
        Valuation {
            size,
            facts: BTreeMap::new(),
        }
    }

    fn set(&mut self, v: &str, x: usize, y: usize) {
        if x <= y && y < self.size {
            self.facts.entry(v.to_string()).or_default().insert(Interval::new(x, y));
        }
    }

    fn into_model(self, semantics: Semantics) -> FiniteModel {
        let mut m = FiniteModel::new(FiniteFrame::new(self.size, semantics));
        m.valuation = self.facts;
        m
    }
}

/// Index `k` of the north-west grid enumeration as `(i, j)`, `i <= j`, line by line.
pub fn grid_point(k: usize) -> (usize, usize) {
    let mut j = 0;
    while (j + 1) * (j + 2) / 2 <= k {
        j += 1;
    }
    (k - j * (j + 1) / 2, j)
}

pub fn grid_index(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

pub fn up_neighbour(k: usize) -> usize {
    let (i, j) = grid_point(k);
    grid_index(i, j + 1)
}

/// Configurations `C_0 .. C_{steps-1}`, or the halting time if it comes first.
fn diverging_run(tm: &TuringMachine, steps: usize, conv: Convention) -> Result<Vec<Configuration>, WindowError> {
    if let Some(h) = halting_time(tm, steps) {
        return Err(WindowError::Halts(h));
    }
    Ok(simulate(tm, steps, conv)?)
}

/// The cell shown by grid unit `k`: `C_{j-1}(i)` for the point `(i, j)`, blank at the origin.
fn grid_content(run: &[Configuration], k: usize) -> Cell {
    let (i, j) = grid_point(k);
    if j == 0 {
        Cell::blank()
    } else {
        run[j - 1][i]
    }
}

/// The intended model of `construction` for the first `window` units.
pub fn build_soundness_model(
    tm: &TuringMachine,
    construction: Construction,
    window: usize,
) -> Result<SoundnessModel, WindowError> {
    if window == 0 {
        return Err(WindowError::EmptyWindow);
    }
    match construction {
        Construction::PspaceCore { cells, reflexive } => pspace_model(tm, cells, reflexive, window),
        Construction::DiamondHorn => diamond_model(tm, window),
        Construction::CoreIrrefl => core_model(tm, window),
    }
}

fn pspace_model(tm: &TuringMachine, cells: usize, reflexive: bool, window: usize) -> Result<SoundnessModel, WindowError> {
    let (formula, bimps) = gen_pspace_core_traced(tm, cells, GenOptions::default())?;
    let size = 2 * window + 9;
    let steps = size / 2 + 1;
    if let Some(h) = halting_time(tm, steps) {
        return Err(WindowError::Halts(h));
    }
    let run = simulate(tm, steps, Convention::Fixed(cells))?;
    let mut val = Valuation::new(size);
    for (n, c) in run.iter().enumerate() {
        let t = 2 * n + 2;
        val.set("unit", 2 * n, t);
        for (i, &z) in c.iter().enumerate() {
            for x in 0..=t {
                val.set(&format!("cell_{i}_{}", tm.cell_name(z)), x, t);
            }
            let bar = format!("cellbar_{i}_{}", tm.cell_name(z));
            if z.state.is_some() {
                val.set(&bar, t, t + 2);
            } else {
                val.set(&bar, t, t + 3);
            }
        }
    }
    let semantics = if reflexive {
        Semantics::REFLEXIVE
    } else {
        Semantics::IRREFLEXIVE
    };
    let mut model = val.into_model(semantics);
    place_bimps(&mut model, &bimps, false);
    Ok(SoundnessModel {
        formula,
        model,
        seed: Interval::new(0, 2),
        window_end: 2 * window,
        two_sided: false,
    })
}

/// Grid pointers of unit `k` at unit spacing 2 from `offset`: up, up_u, up_r, up_p.
fn pointers(offset: usize, k: usize) -> [(usize, usize); 4] {
    let u = |n: usize| offset + 2 * n;
    let up = up_neighbour(k);
    [
        (u(k), u(up + 1)),
        (u(k), u(up + 2)),
        (u(k + 1), u(up + 2)),
        (u(k + 1), u(up + 3)),
    ]
}

fn diamond_model(tm: &TuringMachine, window: usize) -> Result<SoundnessModel, WindowError> {
    let formula = gen_diamond_horn(tm, GenOptions::default());
    let size = 2 * (up_neighbour(window - 1) + 3) + 3;
    let units = size / 2;
    let (_, last_line) = grid_point(units);
    let run = diverging_run(tm, last_line + 1, Convention::Growing)?;
    let mut val = Valuation::new(size);
    val.set("now", 0, 2);
    for k in 0..units {
        let (i, j) = grid_point(k);
        val.set("unit", 2 * k, 2 * k + 2);
        val.set("nonunit", 2 * k + 1, 2 * k + 1);
        val.set(if i == j { "diag" } else { "diagbar" }, 2 * k, 2 * k + 2);
        val.set(&tm.cell_name(grid_content(&run, k)), 2 * k, 2 * k + 2);
        for (name, (x, y)) in ["up", "up_u", "up_r", "up_p"].into_iter().zip(pointers(0, k)) {
            val.set(name, x, y);
        }
    }
    Ok(SoundnessModel {
        formula,
        model: val.into_model(Semantics::IRREFLEXIVE),
        seed: Interval::new(0, 2),
        window_end: 2 * window,
        two_sided: false,
    })
}

fn core_model(tm: &TuringMachine, window: usize) -> Result<SoundnessModel, WindowError> {
    let (formula, bimps) = gen_core_irreflexive_traced(tm, GenOptions::default());
    let off = 2;
    let u = |n: usize| off + 2 * n;
    let (_, wline) = grid_point(window - 1);
    let size = u(grid_index(0, wline + 3).max(up_neighbour(window - 1) + 2)) + 3;
    let units = (size - off) / 2;
    let (_, last_line) = grid_point(units);
    let run = diverging_run(tm, last_line + 1, Convention::Growing)?;
    let mut val = Valuation::new(size);
    val.set("now", u(0), u(1));
    for k in 0..units {
        let (i, j) = grid_point(k);
        val.set("unit", u(k), u(k + 1));
        let content = grid_content(&run, k);
        val.set(&tm.cell_name(content), u(k), u(k + 1));
        if i == j {
            val.set("diag", u(k), u(k + 1));
        }
        if i == 0 && j > 0 {
            val.set("wall", u(k), u(k + 1));
            val.set("line", u(k), u(grid_index(j, j) + 1));
        }
        let up = up_neighbour(k);
        val.set("up", u(k), u(up + 1));
        let next = grid_content_checked(&run, k + 1);
        if let Some(z) = next {
            val.set(
                &format!("pair_{}_{}", tm.cell_name(content), tm.cell_name(z)),
                u(k),
                u(k + 1),
            );
        }
        if k > 0 {
            if let (Some(x), Some(z)) = (grid_content_checked(&run, k - 1), next) {
                let name = format!(
                    "triple_{}_{}_{}",
                    tm.cell_name(x),
                    tm.cell_name(content),
                    tm.cell_name(z)
                );
                val.set(&name, u(k), u(up + 1));
                for a in 0..=u(k) {
                    val.set(&format!("triplebar{}", &name["triple".len()..]), a, u(k));
                }
            }
        }
        if let Some(z) = next {
            let name = format!("pairbar_{}_{}", tm.cell_name(content), tm.cell_name(z));
            for b in u(k + 1)..size {
                val.set(&name, u(k + 1), b);
            }
        }
    }
    let mut model = val.into_model(Semantics::IRREFLEXIVE);
    place_bimps(&mut model, &bimps, true);
    Ok(SoundnessModel {
        formula,
        model,
        seed: Interval::new(u(0), u(1)),
        window_end: u(window),
        two_sided: true,
    })
}

fn grid_content_checked(run: &[Configuration], k: usize) -> Option<Cell> {
    let (_, j) = grid_point(k);
    (j <= run.len()).then(|| grid_content(run, k))
}

/// Values the fresh variables of every binary implication from where its
/// premises hold.
///
/// For a horizontal instance and each point `e` where some `l1`- or `l2`-interval
/// ends: `mu` covers the whole row starting at `e` exactly when both end there,
/// so `[A]mu` holds only at intervals ending at such points.
fn place_bimps(model: &mut FiniteModel, bimps: &[Bimp], two_sided: bool) {
    let size = model.frame.size;
    let mut facts: Vec<(String, Interval)> = Vec::new();
    {
        let mut ev = PrefixEvaluator::new(model, two_sided);
        for b in bimps {
            let t1 = ev.table(&b.l1);
            let t2 = ev.table(&b.l2);
            let pick = |t: &[K3]| -> BTreeSet<usize> {
                model
                    .frame
                    .intervals
                    .iter()
                    .zip(t)
                    .filter(|(_, v)| **v == K3::True)
                    .map(|(i, _)| if b.vertical { i.start } else { i.end })
                    .collect()
            };
            let (p1, p2) = (pick(&t1), pick(&t2));
            let mut add = |v: &str, x: isize, y: isize| {
                if 0 <= x && x <= y && (y as usize) < size {
                    facts.push((v.to_string(), Interval::new(x as usize, y as usize)));
                }
            };
            for &p in p1.union(&p2) {
                let e = p as isize;
                let last = size as isize - 1;
                let (in1, in2) = (p1.contains(&p), p2.contains(&p));
                // Horizontal rows start at `e`; vertical columns end at `e`.
                let iv = |d0: isize, d1: isize| if b.vertical { (e - d1, e - d0) } else { (e + d0, e + d1) };
                let row = |from: isize| -> Vec<(isize, isize)> {
                    if b.vertical {
                        (0..=e - from).map(|x| (x, e)).collect()
                    } else {
                        (e + from..=last).map(|y| (e, y)).collect()
                    }
                };
                let (mu1, mu2, mu): (Option<(isize, isize)>, Option<(isize, isize)>, Vec<(isize, isize)>) =
                    match (in1, in2) {
                        (true, true) => (Some(iv(0, 1)), Some(iv(0, 2)), row(0)),
                        (true, false) => (Some(iv(0, 2)), None, row(2)),
                        _ => (None, Some(iv(0, 1)), vec![iv(0, 0), iv(0, 1)]),
                    };
                if let Some((x, y)) = mu1 {
                    add(&b.mu1, x, y);
                }
                if let Some((x, y)) = mu2 {
                    add(&b.mu2, x, y);
                }
                for (x, y) in mu {
                    add(&b.mu, x, y);
                }
            }
        }
    }
    for (v, i) in facts {
        model.set(&v, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::tm::{fixtures, Tape};

    #[test]
    fn grid_enumeration() {
        assert_eq!(grid_point(0), (0, 0));
        assert_eq!(grid_point(2), (1, 1));
        assert_eq!(grid_point(3), (0, 2));
        assert_eq!(up_neighbour(0), 1);
        assert_eq!(up_neighbour(2), 4);
        for k in 0..60 {
            let (i, j) = grid_point(k);
            assert!(i <= j);
            assert_eq!(grid_index(i, j), k);
        }
    }

    #[test]
    fn empty_window_is_rejected() {
        let tm = fixtures::bouncer();
        assert_eq!(
            build_soundness_model(&tm, Construction::DiamondHorn, 0).unwrap_err(),
            WindowError::EmptyWindow
        );
    }

    #[test]
    fn halting_inside_the_window_is_an_error() {
        let tm = fixtures::halter();
        let err = build_soundness_model(&tm, Construction::DiamondHorn, 4).unwrap_err();
        assert!(matches!(err, WindowError::Halts(_)));
    }

    #[test]
    fn empty_formula_passes() {
        let sm = build_soundness_model(&fixtures::bouncer(), Construction::DiamondHorn, 3).unwrap();
        let r = check_window(&sm, &Formula::default());
        assert!(r.holds());
        assert_eq!(r.passed + r.skipped, 0);
    }

    #[test]
    fn pspace_units_are_even_pairs() {
        let sm = build_soundness_model(
            &fixtures::bouncer(),
            Construction::PspaceCore {
                cells: 3,
                reflexive: false,
            },
            4,
        )
        .unwrap();
        let units = &sm.model.valuation["unit"];
        assert!(units.contains(&Interval::new(0, 2)));
        assert!(units.contains(&Interval::new(4, 6)));
        assert!(!units.contains(&Interval::new(1, 3)));
    }

    #[test]
    fn pspace_window_passes_in_both_flavors() {
        let tm = fixtures::bouncer();
        for reflexive in [false, true] {
            let sm = build_soundness_model(&tm, Construction::PspaceCore { cells: 3, reflexive }, 8).unwrap();
            let r = check_window(&sm, &sm.formula);
            assert!(r.holds(), "reflexive={reflexive}\n{r}");
            assert!(r.passed > 0);
        }
    }

    #[test]
    fn diamond_window_passes() {
        let sm = build_soundness_model(&fixtures::bouncer(), Construction::DiamondHorn, 8).unwrap();
        let r = check_window(&sm, &sm.formula);
        assert!(r.holds(), "{r}");
    }

    #[test]
    fn core_window_passes() {
        let sm = build_soundness_model(&fixtures::bouncer(), Construction::CoreIrrefl, 6).unwrap();
        let r = check_window(&sm, &sm.formula);
        assert!(r.holds(), "{r}");
    }

    #[test]
    fn dropped_cell_breaks_one_transition() {
        let tm = fixtures::bouncer();
        let mut sm = build_soundness_model(
            &tm,
            Construction::PspaceCore {
                cells: 3,
                reflexive: false,
            },
            8,
        )
        .unwrap();
        assert!(sm.drop_fact("cell_0_lm", Interval::new(2, 4)));
        let r = check_window(&sm, &sm.formula);
        assert_eq!(r.failures.len(), 1, "{r}");
        assert_eq!(r.failures[0].world, Interval::new(2, 4));
        assert!(r.failures[0].text.contains("cellbar_0_head_q0_lm"), "{r}");
    }

    #[test]
    fn dropped_symbol_breaks_one_grid_step() {
        let tm = fixtures::bouncer();
        let mut sm = build_soundness_model(&tm, Construction::DiamondHorn, 8).unwrap();
        let run = simulate(&tm, 3, Convention::Growing).unwrap();
        let k = grid_index(1, 2);
        let name = tm.cell_name(run[1][1]);
        assert!(sm.drop_fact(&name, Interval::new(2 * k, 2 * k + 2)));
        let r = check_window(&sm, &sm.formula);
        assert_eq!(r.failures.len(), 1, "{r}");
        assert_eq!(r.failures[0].world, Interval::new(4, 6));
        assert!(run[1][1] != Cell::plain(Tape::LeftEnd));
    }

    #[test]
    fn core_needs_a_past() {
        let mut sm = build_soundness_model(&fixtures::bouncer(), Construction::CoreIrrefl, 6).unwrap();
        sm.two_sided = false;
        let r = check_window(&sm, &sm.formula);
        assert!(!r.holds());
        assert!(r.failures.iter().all(|x| x.world.start == 0), "{r}");
    }

    #[test]
    fn core_dropped_symbol_is_caught() {
        let tm = fixtures::bouncer();
        let mut sm = build_soundness_model(&tm, Construction::CoreIrrefl, 6).unwrap();
        let run = simulate(&tm, 3, Convention::Growing).unwrap();
        let k = grid_index(1, 2);
        assert!(sm.drop_fact(&tm.cell_name(run[1][1]), Interval::new(2 + 2 * k, 4 + 2 * k)));
        let r = check_window(&sm, &sm.formula);
        assert_eq!(r.failures.len(), 1, "{r}");
        assert!(r.failures[0].text.contains("-> <E>"), "{r}");
    }
}

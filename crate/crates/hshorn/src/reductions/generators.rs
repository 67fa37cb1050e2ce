//! The six machine-to-formula reductions.
//!
//! Cell contents are named with [`TuringMachine::cell_name`]; the PSpace encodings
//! index them by tape position as `cell_<i>_<name>` and `cellbar_<i>_<name>`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::tm::{tau_unchecked, w_set, Action, Cell, Tape, TuringMachine};
use super::tricks::{box_head, bx, dia, var, Bimp, Builder, Dir};
use crate::syntax::{FragmentInfo, Formula, Head, Literal, Rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("the cell bound must be at least 2, got {0}")]
    TooFewCells(usize),
    #[error("unknown reduction '{0}'")]
    UnknownReduction(String),
}

/// The `c` in the clause-count envelope `c * N^2 * |Γ|^2` of the PSpace encodings.
pub const SIZE_CONSTANT: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenOptions {
    /// Encode halting on finite orders instead of divergence.
    pub fin: bool,
    /// Use the chessboard encoding that works under any semantics (diamond-Horn only).
    pub any_semantics: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reduction {
    PspaceCore,
    PspaceBox,
    DiamondHorn,
    DiamondHornRefl,
    CoreIrrefl,
    BoxHorn,
}

impl Reduction {
    pub const ALL: [Reduction; 6] = [
        Reduction::PspaceCore,
        Reduction::PspaceBox,
        Reduction::DiamondHorn,
        Reduction::DiamondHornRefl,
        Reduction::CoreIrrefl,
        Reduction::BoxHorn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reduction::PspaceCore => "pspace-core",
            Reduction::PspaceBox => "pspace-box",
            Reduction::DiamondHorn => "diamond-horn",
            Reduction::DiamondHornRefl => "diamond-horn-refl",
            Reduction::CoreIrrefl => "core-irrefl",
            Reduction::BoxHorn => "box-horn",
        }
    }

    /// Fragment the desugared output must fall into.
    pub fn fragment(self) -> &'static str {
        match self {
            Reduction::PspaceCore | Reduction::CoreIrrefl => "core",
            Reduction::PspaceBox => "box-core",
            Reduction::DiamondHorn | Reduction::DiamondHornRefl => "diamond-horn",
            Reduction::BoxHorn => "box-horn",
        }
    }

    pub fn fits(self, info: &FragmentInfo) -> bool {
        info.name() == self.fragment()
    }

    pub fn uses_cells(self) -> bool {
        matches!(self, Reduction::PspaceCore | Reduction::PspaceBox)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reduction {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Reduction, GenError> {
        Reduction::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| GenError::UnknownReduction(s.to_string()))
    }
}

/// Dispatches to the generator of `r`; `cells` only matters for the PSpace ones.
pub fn generate(r: Reduction, tm: &TuringMachine, cells: usize, opts: GenOptions) -> Result<Formula, GenError> {
    match r {
        Reduction::PspaceCore => gen_pspace_core(tm, cells, opts),
        Reduction::PspaceBox => gen_pspace_box_core(tm, cells, opts),
        Reduction::DiamondHorn => Ok(gen_diamond_horn(tm, GenOptions { any_semantics: false, ..opts })),
        Reduction::DiamondHornRefl => Ok(gen_diamond_horn(tm, GenOptions { any_semantics: true, ..opts })),
        Reduction::CoreIrrefl => Ok(gen_core_irreflexive(tm, opts)),
        Reduction::BoxHorn => Ok(gen_box_horn_discrete(tm, opts)),
    }
}

fn sym(tm: &TuringMachine, c: Cell) -> Literal {
    var(&tm.cell_name(c))
}

fn cell(tm: &TuringMachine, i: usize, c: Cell) -> Literal {
    var(&format!("cell_{i}_{}", tm.cell_name(c)))
}

fn cellbar(tm: &TuringMachine, i: usize, c: Cell) -> Literal {
    var(&format!("cellbar_{i}_{}", tm.cell_name(c)))
}

fn forbid(b: &mut Builder, body: Vec<Literal>) {
    b.rule(body, Literal::Bot);
}

/// `[R](body -> head)` with a literal innermost head.
fn bh(rel: Rel, body: Vec<Literal>, head: Head) -> Head {
    box_head(rel, body, head)
}

fn lit(l: Literal) -> Head {
    Head::Lit(l)
}

/// Contents the machine can leave on a cell that carries no final head.
fn live_contents(tm: &TuringMachine) -> Vec<Cell> {
    let mut out: Vec<Cell> = tm.tapes().into_iter().map(Cell::plain).collect();
    out.extend(tm.live_heads());
    out
}

fn check_cells(n: usize) -> Result<(), GenError> {
    if n < 2 {
        return Err(GenError::TooFewCells(n));
    }
    Ok(())
}

fn cell_uniqueness(b: &mut Builder, tm: &TuringMachine, n: usize) {
    let gamma = tm.gamma();
    for i in 0..n {
        for &z in &gamma {
            for &z2 in &gamma {
                if z != z2 {
                    forbid(b, vec![cell(tm, i, z), cell(tm, i, z2)]);
                }
            }
        }
    }
}

fn cell_init(b: &mut Builder, tm: &TuringMachine, n: usize) {
    b.init(cell(tm, 0, Cell::head(tm.initial, Tape::LeftEnd)));
    for i in 1..n {
        b.init(cell(tm, i, Cell::blank()));
    }
}

fn cell_nonhalting(b: &mut Builder, tm: &TuringMachine, n: usize) {
    for i in 0..n {
        for t in tm.tapes() {
            forbid(b, vec![cell(tm, i, Cell::head(tm.halt, t))]);
        }
    }
}

/// Where a transition sends the head and what the old head cell becomes.
struct Step {
    /// Position of the head cell after the step.
    target: usize,
    /// Content of the old head cell; `None` when the head stays.
    left_behind: Option<Cell>,
    /// Content of the new head cell, given the old content `z` there.
    arrives: Box<dyn Fn(Tape) -> Cell>,
}

/// The positions `i` a transition out of `(q,s)` is encoded at, with its effect.
fn steps(tm: &TuringMachine, n: usize, head: Cell) -> Vec<(usize, Step)> {
    let (q2, action) = tm.step_of(head).expect("live heads have a transition");
    let mut out = Vec::new();
    match action {
        Action::Write(a) => {
            for i in 0..n {
                let written = Cell::head(q2, Tape::Sym(a));
                out.push((
                    i,
                    Step {
                        target: i,
                        left_behind: None,
                        arrives: Box::new(move |_| written),
                    },
                ));
            }
        }
        Action::Right => {
            for i in 0..n - 1 {
                out.push((
                    i,
                    Step {
                        target: i + 1,
                        left_behind: Some(Cell::plain(head.tape)),
                        arrives: Box::new(move |z| Cell::head(q2, z)),
                    },
                ));
            }
        }
        Action::Left => {
            for i in 1..n {
                out.push((
                    i,
                    Step {
                        target: i - 1,
                        left_behind: Some(Cell::plain(head.tape)),
                        arrives: Box::new(move |z| Cell::head(q2, z)),
                    },
                ));
            }
        }
    }
    out
}

/// Φ_A: PSpace-bounded runs on `n` cells in the core fragment.
pub fn gen_pspace_core(tm: &TuringMachine, n: usize, opts: GenOptions) -> Result<Formula, GenError> {
    gen_pspace_core_traced(tm, n, opts).map(|(f, _)| f)
}

/// [`gen_pspace_core`] together with every binary implication it emitted.
pub fn gen_pspace_core_traced(
    tm: &TuringMachine,
    n: usize,
    opts: GenOptions,
) -> Result<(Formula, Vec<Bimp>), GenError> {
    check_cells(n)?;
    let mut b = Builder::new();
    let unit = var("unit");
    cell_uniqueness(&mut b, tm, n);
    cell_init(&mut b, tm, n);

    let heads = tm.live_heads();
    let tapes = tm.tapes();
    for i in 0..n {
        for &h in &heads {
            b.rule(vec![cell(tm, i, h)], dia(Rel::A, cellbar(tm, i, h)));
        }
    }
    for i in 0..n {
        for &h in &heads {
            for j in 0..n {
                for &t in &tapes {
                    let z = Cell::plain(t);
                    b.bimp_h(&cell(tm, i, h), &cell(tm, j, z), &dia(Rel::A, cellbar(tm, j, z)));
                    forbid(&mut b, vec![cellbar(tm, i, h), dia(Rel::B, cellbar(tm, j, z))]);
                }
            }
        }
    }
    for i in 0..n {
        for q in 0..tm.states.len() {
            for &t in &tapes {
                b.rule(vec![cellbar(tm, i, Cell::head(q, t))], unit.clone());
            }
        }
    }
    b.rule(vec![unit.clone(), bx(Rel::D, unit)], Literal::Bot);

    for &h in &heads {
        for (i, step) in steps(tm, n, h) {
            let src = cellbar(tm, i, h);
            match step.left_behind {
                None => b.rule(vec![src.clone()], cell(tm, i, (step.arrives)(h.tape))),
                Some(c) => b.rule(vec![src.clone()], cell(tm, i, c)),
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                for &t in &tapes {
                    let z = Cell::plain(t);
                    let other = dia(Rel::BBar, cellbar(tm, j, z));
                    let result = if j == step.target && step.left_behind.is_some() {
                        (step.arrives)(t)
                    } else {
                        z
                    };
                    b.bimp_h(&src, &other, &cell(tm, j, result));
                }
            }
        }
    }

    if !opts.fin {
        cell_nonhalting(&mut b, tm, n);
    }
    let bimps = std::mem::take(&mut b.bimps);
    Ok((b.finish(), bimps))
}

/// Φ_A^d: the same runs in the box-core fragment over discrete orders.
pub fn gen_pspace_box_core(tm: &TuringMachine, n: usize, opts: GenOptions) -> Result<Formula, GenError> {
    check_cells(n)?;
    let mut b = Builder::new();
    let unit = var("unit");
    b.init(unit.clone());
    cell_uniqueness(&mut b, tm, n);
    cell_init(&mut b, tm, n);
    if !opts.fin {
        cell_nonhalting(&mut b, tm, n);
    }
    b.rule(vec![unit.clone()], bx(Rel::E, Literal::Bot));
    b.rule(vec![bx(Rel::E, Literal::Bot)], unit);

    let heads = tm.live_heads();
    for i in 0..n {
        for &h in &heads {
            forbid(&mut b, vec![cell(tm, i, h), bx(Rel::BBar, Literal::Bot)]);
        }
    }
    for &h in &heads {
        for (i, step) in steps(tm, n, h) {
            let src = cell(tm, i, h);
            let stays = match step.left_behind {
                None => (step.arrives)(h.tape),
                Some(c) => c,
            };
            b.rule(vec![bx(Rel::B, src.clone())], bx(Rel::E, cell(tm, i, stays)));
            for j in 0..n {
                if j == i {
                    continue;
                }
                for t in tm.tapes() {
                    let z = Cell::plain(t);
                    let result = if j == step.target && step.left_behind.is_some() {
                        (step.arrives)(t)
                    } else {
                        z
                    };
                    b.bimp_diag(&src, &cell(tm, j, z), &cell(tm, j, result));
                }
            }
        }
    }
    Ok(b.finish())
}

/// The grid-independent machine constraints shared by the undecidability encodings.
fn tm_common(b: &mut Builder, tm: &TuringMachine, unit: &Literal, diag: &Literal) {
    let gamma = tm.gamma();
    for &x in &gamma {
        b.rule(vec![sym(tm, x)], unit.clone());
    }
    for &x in &gamma {
        for &y in &gamma {
            if x != y {
                forbid(b, vec![sym(tm, x), sym(tm, y)]);
            }
        }
    }
    b.rule(vec![diag.clone()], sym(tm, Cell::blank()));
}

fn tm_tail(b: &mut Builder, tm: &TuringMachine, unit: &Literal, fin: bool) {
    if fin {
        let end = var("end");
        b.rule(vec![end.clone()], unit.clone());
        for x in live_contents(tm) {
            forbid(b, vec![end.clone(), sym(tm, x)]);
        }
    } else {
        for t in tm.tapes() {
            forbid(b, vec![sym(tm, Cell::head(tm.halt, t))]);
        }
    }
}

fn initial_head(tm: &TuringMachine) -> Cell {
    Cell::head(tm.initial, Tape::LeftEnd)
}

/// Ψ_A (irreflexive) or Ψ_A^r (any semantics): divergence in the diamond-Horn fragment.
pub fn gen_diamond_horn(tm: &TuringMachine, opts: GenOptions) -> Formula {
    let mut b = Builder::new();
    let unit = var("unit");
    let end = var("end");
    let [diag, diagbar, now, up, up_u, up_r, up_p] =
        ["diag", "diagbar", "now", "up", "up_u", "up_r", "up_p"].map(var);
    let guard = opts.fin.then_some(&end);

    if opts.any_semantics {
        let next = var("next");
        b.chessboard(guard);
        b.fill(&unit);
        b.fill(&next);
        b.init(unit.clone());
        b.succ_sq(Dir::Right, &unit, &next, guard);
        b.succ_sq(Dir::Up, &next, &unit, guard);
    } else {
        let nonunit = var("nonunit");
        b.rule(vec![unit.clone()], dia(Rel::D, nonunit.clone()));
        forbid(&mut b, vec![nonunit, unit.clone()]);
        b.init(unit.clone());
        match guard {
            Some(e) => b.guarded(vec![unit.clone()], lit(dia(Rel::A, unit.clone())), e),
            None => b.rule(vec![unit.clone()], dia(Rel::A, unit.clone())),
        }
        for r in [Rel::E, Rel::BBar, Rel::D, Rel::O] {
            forbid(&mut b, vec![unit.clone(), dia(r, unit.clone())]);
        }
    }

    let succ = |b: &mut Builder, dir: Dir, l1: &Literal, l2: &Literal| {
        if opts.any_semantics {
            b.succ_sq(dir, l1, l2, None);
        } else {
            b.grid_succ(dir, l1, l2, &unit);
        }
    };
    b.init(diag.clone());
    b.init(now.clone());
    succ(&mut b, Dir::Up, &now, &up);
    succ(&mut b, Dir::Up, &up, &up_u);
    b.clause(
        vec![unit.clone(), diag.clone()],
        bh(Rel::BBar, vec![up_u.clone()], bh(Rel::E, vec![unit.clone()], lit(diag.clone()))),
    );
    b.clause(vec![up.clone()], bh(Rel::E, vec![unit.clone()], lit(diagbar.clone())));
    forbid(&mut b, vec![diag.clone(), diagbar.clone()]);
    b.clause(
        vec![unit.clone(), diagbar.clone()],
        bh(Rel::BBar, vec![up_u.clone()], bh(Rel::E, vec![up_r.clone()], lit(up.clone()))),
    );
    succ(&mut b, Dir::Right, &up_u, &up_r);
    succ(&mut b, Dir::Up, &up_r, &up_p);
    b.clause(
        vec![unit.clone(), diag.clone()],
        bh(
            Rel::BBar,
            vec![up_u.clone()],
            bh(Rel::E, vec![up_r.clone()], bh(Rel::BBar, vec![up_p.clone()], lit(up.clone()))),
        ),
    );
    if opts.any_semantics {
        for p in [&now, &diag, &diagbar, &up, &up_u, &up_r, &up_p] {
            b.fill(p);
        }
    }

    tm_common(&mut b, tm, &unit, &diag);
    b.init(dia(Rel::A, sym(tm, initial_head(tm))));
    for (x, y, z) in w_set(tm) {
        let t = tau_unchecked(tm, x, y, z);
        b.clause(
            vec![sym(tm, y), dia(Rel::A, sym(tm, z)), dia(Rel::ABar, sym(tm, x))],
            bh(Rel::BBar, vec![up.clone()], bh(Rel::E, vec![unit.clone()], lit(sym(tm, t)))),
        );
    }
    if opts.any_semantics {
        for x in tm.gamma() {
            b.fill(&sym(tm, x));
        }
    }
    tm_tail(&mut b, tm, &unit, opts.fin);
    b.finish()
}

fn pair(tm: &TuringMachine, bar: bool, y: Cell, z: Cell) -> Literal {
    let kind = if bar { "pairbar" } else { "pair" };
    var(&format!("{kind}_{}_{}", tm.cell_name(y), tm.cell_name(z)))
}

fn triple(tm: &TuringMachine, bar: bool, (x, y, z): (Cell, Cell, Cell)) -> Literal {
    let kind = if bar { "triplebar" } else { "triple" };
    var(&format!(
        "{kind}_{}_{}_{}",
        tm.cell_name(x),
        tm.cell_name(y),
        tm.cell_name(z)
    ))
}

/// Divergence in the core fragment under the irreflexive semantics.
pub fn gen_core_irreflexive(tm: &TuringMachine, opts: GenOptions) -> Formula {
    gen_core_irreflexive_traced(tm, opts).0
}

/// [`gen_core_irreflexive`] together with every binary implication it emitted.
pub fn gen_core_irreflexive_traced(tm: &TuringMachine, opts: GenOptions) -> (Formula, Vec<Bimp>) {
    let mut b = Builder::new();
    let [unit, end, now, line, wall, diag, up] = ["unit", "end", "now", "line", "wall", "diag", "up"].map(var);

    b.rule(vec![unit.clone(), bx(Rel::D, unit.clone())], Literal::Bot);
    b.init(unit.clone());
    if opts.fin {
        b.bimp_h(&dia(Rel::L, end.clone()), &unit, &dia(Rel::A, unit.clone()));
    } else {
        b.rule(vec![unit.clone()], dia(Rel::A, unit.clone()));
    }
    for r in [Rel::E, Rel::BBar, Rel::D, Rel::O] {
        forbid(&mut b, vec![unit.clone(), dia(r, unit.clone())]);
    }

    forbid(&mut b, vec![up.clone(), dia(Rel::E, up.clone())]);
    forbid(&mut b, vec![up.clone(), dia(Rel::BBar, up.clone())]);
    b.init(now.clone());
    b.init(dia(Rel::A, line.clone()));
    forbid(&mut b, vec![up.clone(), dia(Rel::D, now)]);
    b.rule(vec![line.clone()], dia(Rel::A, line.clone()));
    b.rule(vec![wall.clone()], unit.clone());
    b.rule(vec![diag.clone()], unit.clone());
    b.rule(vec![line.clone()], dia(Rel::E, diag.clone()));
    b.rule(vec![line.clone()], dia(Rel::B, wall.clone()));
    b.rule(vec![unit.clone()], dia(Rel::BBar, up.clone()));
    b.rule(vec![up.clone()], dia(Rel::E, unit.clone()));
    b.rule(vec![up.clone()], dia(Rel::B, unit.clone()));
    forbid(&mut b, vec![up.clone(), dia(Rel::BBar, line.clone())]);
    forbid(&mut b, vec![up.clone(), dia(Rel::D, line.clone())]);
    forbid(&mut b, vec![up.clone(), dia(Rel::D, up.clone())]);
    b.rule(vec![wall], dia(Rel::EBar, up.clone()));
    b.bimp_h(
        &dia(Rel::DBar, line),
        &unit,
        &dia(Rel::A, dia(Rel::ABar, up.clone())),
    );

    tm_common(&mut b, tm, &unit, &diag);
    b.init(dia(Rel::A, sym(tm, initial_head(tm))));
    let gamma = tm.gamma();
    for &y in &gamma {
        for &z in &gamma {
            b.bimp_v(&dia(Rel::ABar, sym(tm, y)), &sym(tm, z), &pair(tm, true, y, z));
            b.rule(vec![pair(tm, true, y, z)], dia(Rel::ABar, pair(tm, false, y, z)));
            b.rule(vec![pair(tm, false, y, z)], unit.clone());
        }
    }
    for w in w_set(tm) {
        let (x, y, z) = w;
        b.bimp_h(&dia(Rel::A, pair(tm, false, y, z)), &sym(tm, x), &triple(tm, true, w));
        b.rule(vec![triple(tm, true, w)], dia(Rel::A, triple(tm, false, w)));
        b.rule(vec![triple(tm, false, w)], up.clone());
        b.rule(vec![triple(tm, false, w)], dia(Rel::E, sym(tm, tau_unchecked(tm, x, y, z))));
    }
    tm_tail(&mut b, tm, &unit, opts.fin);
    let bimps = std::mem::take(&mut b.bimps);
    (b.finish(), bimps)
}

/// Ψ_A^□: divergence in the box-Horn fragment over discrete orders, irreflexive semantics.
pub fn gen_box_horn_discrete(tm: &TuringMachine, opts: GenOptions) -> Formula {
    let mut b = Builder::new();
    let [unit, init, wall, diag, grid_proper, grid_copy, up, mirror, first_mirror, last_mirror, last_up] = [
        "unit",
        "init",
        "wall",
        "diag",
        "grid_proper",
        "grid_copy",
        "up",
        "mirror",
        "first_mirror",
        "last_mirror",
        "last_up",
    ]
    .map(var);
    let bot = Literal::Bot;

    forbid(&mut b, vec![unit.clone(), bx(Rel::E, bot.clone())]);
    b.rule(vec![unit.clone()], bx(Rel::E, bx(Rel::B, bot.clone())));
    b.rule(
        vec![dia(Rel::E, bx(Rel::E, bot.clone())), bx(Rel::E, bx(Rel::B, bot.clone()))],
        unit.clone(),
    );

    b.init(init.clone());
    b.nw_next(&[init.clone()], &last_up);
    b.rule(vec![init.clone()], unit.clone());
    b.rule(vec![init.clone()], wall.clone());
    b.rule(vec![unit.clone(), dia(Rel::EBar, last_up.clone())], diag.clone());
    b.clause(vec![diag.clone()], bh(Rel::A, vec![unit.clone()], lit(first_mirror.clone())));
    b.nw_next(&[first_mirror.clone()], &mirror);
    b.nw_next(&[wall.clone()], &up);
    b.rule(vec![unit.clone(), dia(Rel::EBar, up.clone())], grid_proper.clone());
    b.nw_next(&[mirror.clone(), dia(Rel::B, grid_proper.clone())], &mirror);
    b.rule(vec![mirror.clone(), dia(Rel::B, wall.clone())], last_mirror.clone());
    b.rule(vec![unit.clone(), dia(Rel::EBar, mirror.clone())], grid_copy.clone());
    b.rule(vec![unit.clone(), dia(Rel::EBar, last_mirror)], wall.clone());
    b.nw_next(&[up.clone(), dia(Rel::B, grid_copy.clone())], &up);
    b.rule(vec![up.clone(), dia(Rel::B, first_mirror.clone())], last_up);

    for x in live_contents(tm) {
        forbid(&mut b, vec![unit.clone(), sym(tm, x), bx(Rel::BBar, bot.clone())]);
    }
    tm_common(&mut b, tm, &unit, &diag);
    b.rule(vec![init], sym(tm, initial_head(tm)));
    b.rule(vec![first_mirror], sym(tm, Cell::plain(Tape::LeftEnd)));
    let to_unit = |t: Cell| bh(Rel::E, vec![unit.clone()], lit(sym(tm, t)));
    let w = w_set(tm);
    for &(x, y, z) in &w {
        b.clause(
            vec![grid_proper.clone(), sym(tm, y), dia(Rel::A, sym(tm, z)), dia(Rel::ABar, sym(tm, x))],
            bh(Rel::BBar, vec![mirror.clone()], to_unit(tau_unchecked(tm, x, y, z))),
        );
    }
    for &(x, y, z) in &w {
        if x == Cell::blank() {
            b.clause(
                vec![wall.clone(), sym(tm, y), dia(Rel::A, sym(tm, z))],
                bh(Rel::BBar, vec![mirror.clone()], to_unit(tau_unchecked(tm, x, y, z))),
            );
        }
    }
    for x in tm.gamma() {
        b.clause(
            vec![grid_copy.clone(), dia(Rel::BBar, up.clone()), sym(tm, x)],
            bh(Rel::BBar, vec![up.clone()], to_unit(x)),
        );
    }
    if !opts.fin {
        for t in tm.tapes() {
            forbid(&mut b, vec![sym(tm, Cell::head(tm.halt, t))]);
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::tm::fixtures;
    use crate::syntax::{classify, desugar, render};

    fn opts(fin: bool) -> GenOptions {
        GenOptions {
            fin,
            any_semantics: false,
        }
    }

    #[test]
    fn fragments_match() {
        for (name, tm) in fixtures::all() {
            for r in Reduction::ALL {
                for fin in [false, true] {
                    let f = generate(r, &tm, 3, opts(fin)).unwrap();
                    let info = classify(&desugar(&f));
                    assert!(r.fits(&info), "{name} {r} fin={fin}: {}", info.name());
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let tm = fixtures::counter();
        for r in Reduction::ALL {
            let a = render(&generate(r, &tm, 4, opts(false)).unwrap());
            let b = render(&generate(r, &tm, 4, opts(false)).unwrap());
            assert_eq!(a, b, "{r}");
        }
    }

    #[test]
    fn pspace_initial_conditions() {
        let tm = fixtures::bouncer();
        let f = gen_pspace_core(&tm, 4, opts(false)).unwrap();
        assert_eq!(f.initial.len(), 4);
        assert_eq!(f.initial[0], var("cell_0_head_q0_lm"));
        assert_eq!(f.initial[3], var("cell_3_blank"));
        assert_eq!(gen_pspace_core(&tm, 1, opts(false)), Err(GenError::TooFewCells(1)));
    }

    #[test]
    fn uniqueness_count() {
        let tm = fixtures::bouncer();
        let n = 3;
        let f = gen_pspace_core(&tm, n, opts(false)).unwrap();
        let g = tm.gamma().len();
        let uniq = f
            .clauses
            .iter()
            .filter(|c| {
                c.head == Head::Lit(Literal::Bot)
                    && c.body.len() == 2
                    && c.body.iter().all(|l| matches!(l, Literal::Var(v) if v.starts_with("cell_")))
            })
            .count();
        assert_eq!(uniq, n * g * (g - 1));
    }

    #[test]
    fn fin_drops_final_state_clauses() {
        let tm = fixtures::bouncer();
        let a = gen_pspace_core(&tm, 3, opts(false)).unwrap();
        let b = gen_pspace_core(&tm, 3, opts(true)).unwrap();
        assert_eq!(a.clauses.len() - b.clauses.len(), 3 * tm.tapes().len());
    }

    #[test]
    fn box_core_has_punctual_units() {
        let f = gen_pspace_box_core(&fixtures::bouncer(), 3, opts(false)).unwrap();
        let unit = var("unit");
        let e_bot = bx(Rel::E, Literal::Bot);
        assert!(f.clauses.iter().any(|c| c.body == [unit.clone()] && c.head == lit(e_bot.clone())));
        assert!(f.clauses.iter().any(|c| c.body == [e_bot.clone()] && c.head == lit(unit.clone())));
    }

    #[test]
    fn diamond_horn_conjuncts() {
        let tm = fixtures::bouncer();
        let f = gen_diamond_horn(&tm, opts(false));
        for v in ["unit", "diag", "now"] {
            assert!(f.initial.contains(&var(v)));
        }
        let r = gen_diamond_horn(
            &tm,
            GenOptions {
                fin: false,
                any_semantics: true,
            },
        );
        let fills = r
            .clauses
            .iter()
            .filter(|c| c.body.len() == 2 && c.body.contains(&var("up_p")))
            .count();
        assert!(fills > 0);
        assert_eq!(r.initial.iter().filter(|l| **l == var("unit")).count(), 1);
    }

    #[test]
    fn core_keeps_injectivity() {
        let f = gen_core_irreflexive(&fixtures::bouncer(), opts(false));
        let up = var("up");
        for r in [Rel::E, Rel::BBar] {
            assert!(f
                .clauses
                .iter()
                .any(|c| c.body == [up.clone(), dia(r, up.clone())] && c.head == lit(Literal::Bot)));
        }
    }

    #[test]
    fn pspace_sizes_stay_quadratic() {
        for (_, tm) in fixtures::all() {
            let g = tm.gamma().len();
            for n in 2..=6 {
                let bound = SIZE_CONSTANT * n * n * g * g;
                let a = gen_pspace_core(&tm, n, opts(false)).unwrap();
                let b = gen_pspace_box_core(&tm, n, opts(false)).unwrap();
                assert!(a.clauses.len() <= bound, "{} > {bound}", a.clauses.len());
                assert!(b.clauses.len() <= bound, "{} > {bound}", b.clauses.len());
            }
        }
    }
}

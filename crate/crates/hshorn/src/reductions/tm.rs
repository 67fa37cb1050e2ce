//! Single-tape right-infinite deterministic Turing machines, their runs from the
//! empty tape, and the triples-to-cells function.
//!
//! Machine files are line based:
//!
//! ```text
//! states: q0 q1 qf
//! initial: q0
//! halt: qf
//! alphabet: _ a
//! delta: q0,$ -> q1,R
//! delta: q1,_ -> q0,L
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Tape contents: an alphabet index (0 is the blank) or the left-end marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tape {
    LeftEnd,
    Sym(usize),
}

pub const BLANK: Tape = Tape::Sym(0);

/// A symbol of Γ: tape contents, possibly carrying the head in state `state`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub state: Option<usize>,
    pub tape: Tape,
}

impl Cell {
    pub fn plain(tape: Tape) -> Cell {
        Cell { state: None, tape }
    }

    pub fn head(state: usize, tape: Tape) -> Cell {
        Cell {
            state: Some(state),
            tape,
        }
    }

    pub fn blank() -> Cell {
        Cell::plain(BLANK)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Write(usize),
    Left,
    Right,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing `{0}:` line")]
    Missing(&'static str),
    #[error("delta is undefined on {0}")]
    Partial(String),
    #[error("delta({0}) must move right")]
    LeftEndNotRight(String),
    #[error("the head left the {0} available cells")]
    OutOfCells(usize),
    #[error("triple {0} is not a legal window")]
    NotInW(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub initial: usize,
    pub halt: usize,
    /// `alphabet[0]` is the blank.
    pub alphabet: Vec<String>,
    pub delta: BTreeMap<(usize, Tape), (usize, Action)>,
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TuringMachine {
    pub fn parse(text: &str) -> Result<TuringMachine, TmError> {
        let mut states: Option<Vec<String>> = None;
        let mut initial = None;
        let mut halt = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut deltas = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| TmError::Parse {
                line,
                msg: msg.to_string(),
            };
            let (key, rest) = content.split_once(':').ok_or_else(|| err("expected `key: value`"))?;
            let rest = rest.trim();
            match key.trim() {
                "states" => {
                    let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() || !names.iter().all(|n| is_name(n)) {
                        return Err(err("state names must be identifiers"));
                    }
                    states = Some(names);
                }
                "initial" => initial = Some((line, rest.to_string())),
                "halt" => halt = Some((line, rest.to_string())),
                "alphabet" => {
                    let syms: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if syms.is_empty() {
                        return Err(err("empty alphabet"));
                    }
                    for s in &syms {
                        if !is_name(s) || s == "$" {
                            return Err(err(&format!("bad symbol `{s}`")));
                        }
                        if s.eq_ignore_ascii_case("l") || s.eq_ignore_ascii_case("r") {
                            return Err(err("L and R are reserved for moves"));
                        }
                    }
                    alphabet = Some(syms);
                }
                "delta" => deltas.push((line, rest.to_string())),
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        let states = states.ok_or(TmError::Missing("states"))?;
        let alphabet = alphabet.ok_or(TmError::Missing("alphabet"))?;
        let state_of = |line: usize, s: &str| {
            states.iter().position(|q| q == s).ok_or_else(|| TmError::Parse {
                line,
                msg: format!("unknown state `{s}`"),
            })
        };
        let (il, iname) = initial.ok_or(TmError::Missing("initial"))?;
        let (hl, hname) = halt.ok_or(TmError::Missing("halt"))?;
        let initial = state_of(il, &iname)?;
        let halt = state_of(hl, &hname)?;
        let tape_of = |line: usize, s: &str| {
            if s == "$" {
                return Ok(Tape::LeftEnd);
            }
            alphabet
                .iter()
                .position(|a| a == s)
                .map(Tape::Sym)
                .ok_or_else(|| TmError::Parse {
                    line,
                    msg: format!("unknown symbol `{s}`"),
                })
        };
        let mut delta = BTreeMap::new();
        for (line, d) in deltas {
            let err = |msg: &str| TmError::Parse {
                line,
                msg: msg.to_string(),
            };
            let (lhs, rhs) = d.split_once("->").ok_or_else(|| err("expected `q,s -> q',X`"))?;
            let (q, s) = lhs.trim().split_once(',').ok_or_else(|| err("expected `q,s`"))?;
            let (q2, x) = rhs.trim().split_once(',').ok_or_else(|| err("expected `q',X`"))?;
            let q = state_of(line, q.trim())?;
            let s = tape_of(line, s.trim())?;
            let q2 = state_of(line, q2.trim())?;
            let x = x.trim();
            let action = match x {
                "L" | "l" => Action::Left,
                "R" | "r" => Action::Right,
                _ => match tape_of(line, x)? {
                    Tape::Sym(a) => Action::Write(a),
                    Tape::LeftEnd => return Err(err("the left-end marker cannot be written")),
                },
            };
            if q == halt {
                return Err(err("no transitions from the halting state"));
            }
            if delta.insert((q, s), (q2, action)).is_some() {
                return Err(err("duplicate transition"));
            }
        }
        let tm = TuringMachine {
            states,
            initial,
            halt,
            alphabet,
            delta,
        };
        tm.validate()?;
        Ok(tm)
    }

    pub fn validate(&self) -> Result<(), TmError> {
        let mut missing = Vec::new();
        for q in self.live_states() {
            for t in self.tapes() {
                match self.delta.get(&(q, t)) {
                    None => missing.push(format!("({},{})", self.states[q], self.tape_text(t))),
                    Some(&(_, a)) if t == Tape::LeftEnd && a != Action::Right => {
                        return Err(TmError::LeftEndNotRight(format!("{},$", self.states[q])))
                    }
                    _ => {}
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(TmError::Partial(missing.join(" ")))
        }
    }

    /// Q minus the halting state.
    pub fn live_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.len()).filter(move |&q| q != self.halt)
    }

    /// Σ ∪ {£}, marker first.
    pub fn tapes(&self) -> Vec<Tape> {
        std::iter::once(Tape::LeftEnd)
            .chain((0..self.alphabet.len()).map(Tape::Sym))
            .collect()
    }

    pub fn symbols(&self) -> Vec<Tape> {
        (0..self.alphabet.len()).map(Tape::Sym).collect()
    }

    /// Γ: tape contents, with and without a head in any state.
    pub fn gamma(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self.tapes().into_iter().map(Cell::plain).collect();
        for q in 0..self.states.len() {
            out.extend(self.tapes().into_iter().map(|t| Cell::head(q, t)));
        }
        out
    }

    /// Q⁻ × (Σ ∪ {£}).
    pub fn live_heads(&self) -> Vec<Cell> {
        self.live_states()
            .flat_map(|q| self.tapes().into_iter().map(move |t| Cell::head(q, t)))
            .collect()
    }

    pub fn step_of(&self, c: Cell) -> Option<(usize, Action)> {
        let q = c.state?;
        self.delta.get(&(q, c.tape)).copied()
    }

    pub fn tape_text(&self, t: Tape) -> String {
        match t {
            Tape::LeftEnd => "$".into(),
            Tape::Sym(a) => self.alphabet[a].clone(),
        }
    }

    pub fn cell_text(&self, c: Cell) -> String {
        match c.state {
            Some(q) => format!("({},{})", self.states[q], self.tape_text(c.tape)),
            None => self.tape_text(c.tape),
        }
    }

    /// Identifier used for `c` inside generated formulas.
    pub fn cell_name(&self, c: Cell) -> String {
        let t = match c.tape {
            Tape::LeftEnd => "lm".to_string(),
            Tape::Sym(0) => "blank".to_string(),
            Tape::Sym(a) => format!("sym_{}", self.alphabet[a]),
        };
        match c.state {
            Some(q) => format!("head_{}_{t}", self.states[q]),
            None => t,
        }
    }

    pub fn config_text(&self, c: &[Cell]) -> String {
        c.iter().map(|&x| self.cell_text(x)).collect::<Vec<_>>().join(" ")
    }

    pub fn size(&self) -> usize {
        self.states.len() * self.tapes().len()
    }
}

/// Length convention for finite configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `|C_n| = n + 2`, the last cell always blank.
    Growing,
    /// Exactly `N` cells; the head must never reach the last one.
    Fixed(usize),
}

pub type Configuration = Vec<Cell>;

pub fn initial_configuration(tm: &TuringMachine, conv: Convention) -> Configuration {
    let len = match conv {
        Convention::Growing => 2,
        Convention::Fixed(n) => n,
    };
    let mut c = vec![Cell::blank(); len];
    c[0] = Cell::head(tm.initial, Tape::LeftEnd);
    c
}

fn head_position(c: &[Cell]) -> usize {
    c.iter().position(|x| x.state.is_some()).expect("configuration without a head")
}

/// `C_0 .. C_{min(steps,H)-1}`; a configuration in the halting state ends the run.
pub fn simulate(tm: &TuringMachine, steps: usize, conv: Convention) -> Result<Vec<Configuration>, TmError> {
    let mut out = Vec::new();
    let mut cur = initial_configuration(tm, conv);
    for _ in 0..steps {
        if let Convention::Fixed(n) = conv {
            if head_position(&cur) + 1 >= n {
                return Err(TmError::OutOfCells(n));
            }
        }
        let halted = cur[head_position(&cur)].state == Some(tm.halt);
        out.push(cur.clone());
        if halted {
            break;
        }
        cur = next_configuration(tm, &cur);
        if conv == Convention::Growing {
            cur.push(Cell::blank());
        }
    }
    Ok(out)
}

fn next_configuration(tm: &TuringMachine, c: &[Cell]) -> Configuration {
    let mut next = c.to_vec();
    let h = head_position(c);
    let (q2, action) = tm.step_of(c[h]).expect("validated machines are total");
    match action {
        Action::Write(a) => next[h] = Cell::head(q2, Tape::Sym(a)),
        Action::Right => {
            next[h] = Cell::plain(c[h].tape);
            next[h + 1] = Cell::head(q2, c[h + 1].tape);
        }
        Action::Left => {
            next[h] = Cell::plain(c[h].tape);
            next[h - 1] = Cell::head(q2, c[h - 1].tape);
        }
    }
    next
}

/// Number of configurations up to and including the halting one, if within `steps`.
pub fn halting_time(tm: &TuringMachine, steps: usize) -> Option<usize> {
    let run = simulate(tm, steps, Convention::Growing).ok()?;
    let last = run.last()?;
    (last[head_position(last)].state == Some(tm.halt)).then_some(run.len())
}

pub type Triple = (Cell, Cell, Cell);

/// Triples that occur as three consecutive cells when the growing configurations
/// are written one after another.
///
/// Besides the displayed families this contains the windows around a head that
/// straddles a line break, e.g. `(_, $, (q,s))` and `((q,s), _, $)`.
pub fn w_set(tm: &TuringMachine) -> BTreeSet<Triple> {
    let live: Vec<usize> = tm.live_states().collect();
    let mut s_plus: Vec<Cell> = tm.symbols().into_iter().map(Cell::plain).collect();
    for &q in &live {
        s_plus.extend(tm.symbols().into_iter().map(|t| Cell::head(q, t)));
    }
    let mut lend = vec![Cell::plain(Tape::LeftEnd)];
    lend.extend(live.iter().map(|&q| Cell::head(q, Tape::LeftEnd)));
    let heads = |cs: &[Cell]| cs.iter().filter(|c| c.state.is_some()).count();
    let blank = Cell::blank();
    let mut out = BTreeSet::new();
    for &y in &s_plus {
        for &z in &s_plus {
            for &x in s_plus.iter().chain(&lend) {
                if heads(&[x, y, z]) <= 1 {
                    out.insert((x, y, z));
                }
            }
        }
    }
    for &y in &lend {
        for &z in &s_plus {
            if heads(&[y, z]) <= 1 {
                out.insert((blank, y, z));
            }
        }
    }
    for &x in &s_plus {
        for &z in &lend {
            out.insert((x, blank, z));
        }
    }
    out.insert((Cell::head(tm.initial, Tape::LeftEnd), blank, Cell::plain(Tape::LeftEnd)));
    out
}

/// The subsets of [`w_set`] written out in the displayed union, for comparison.
pub fn w_set_displayed(tm: &TuringMachine) -> BTreeSet<Triple> {
    let live: Vec<usize> = tm.live_states().collect();
    let sigma: Vec<Cell> = tm.symbols().into_iter().map(Cell::plain).collect();
    let mut qs = Vec::new();
    for &q in &live {
        qs.extend(tm.symbols().into_iter().map(|t| Cell::head(q, t)));
    }
    let mut lend = vec![Cell::plain(Tape::LeftEnd)];
    lend.extend(live.iter().map(|&q| Cell::head(q, Tape::LeftEnd)));
    let mut out = BTreeSet::new();
    let mut add = |xs: &[Cell], ys: &[Cell], zs: &[Cell]| {
        for &x in xs {
            for &y in ys {
                for &z in zs {
                    out.insert((x, y, z));
                }
            }
        }
    };
    add(&qs, &sigma, &sigma);
    add(&sigma, &qs, &sigma);
    add(&sigma, &sigma, &qs);
    add(&lend, &sigma, &sigma);
    add(&[Cell::blank()], &lend, &sigma);
    add(&sigma, &[Cell::blank()], &lend);
    out.insert((Cell::head(tm.initial, Tape::LeftEnd), Cell::blank(), Cell::plain(Tape::LeftEnd)));
    out
}

/// τ without the membership check.
pub fn tau_unchecked(tm: &TuringMachine, x: Cell, y: Cell, z: Cell) -> Cell {
    let x_right = matches!(tm.step_of(x), Some((_, Action::Right)));
    let z_left = matches!(z.tape, Tape::Sym(_)) && matches!(tm.step_of(z), Some((_, Action::Left)));
    if x_right || z_left {
        let (q, _) = if x_right { tm.step_of(x) } else { tm.step_of(z) }.unwrap();
        return Cell::head(q, y.tape);
    }
    match tm.step_of(y) {
        Some((q, Action::Write(a))) if matches!(y.tape, Tape::Sym(_)) => Cell::head(q, Tape::Sym(a)),
        Some((_, Action::Left | Action::Right)) => Cell::plain(y.tape),
        _ => y,
    }
}

pub fn tau(tm: &TuringMachine, x: Cell, y: Cell, z: Cell) -> Result<Cell, TmError> {
    if !w_set(tm).contains(&(x, y, z)) {
        return Err(TmError::NotInW(format!(
            "({}, {}, {})",
            tm.cell_text(x),
            tm.cell_text(y),
            tm.cell_text(z)
        )));
    }
    Ok(tau_unchecked(tm, x, y, z))
}

/// `C_1 .. C_{steps-1}` rebuilt from `C_0` through τ alone.
pub fn reconstruct(tm: &TuringMachine, steps: usize) -> Result<Vec<Configuration>, TmError> {
    let w = w_set(tm);
    let t = |x: Cell, y: Cell, z: Cell| {
        if w.contains(&(x, y, z)) {
            Ok(tau_unchecked(tm, x, y, z))
        } else {
            Err(TmError::NotInW(format!(
                "({}, {}, {})",
                tm.cell_text(x),
                tm.cell_text(y),
                tm.cell_text(z)
            )))
        }
    };
    let mut out = vec![initial_configuration(tm, Convention::Growing)];
    while out.len() < steps {
        let prev = out.last().unwrap();
        if prev.iter().any(|c| c.state == Some(tm.halt)) {
            break;
        }
        let n = prev.len() - 1;
        let mut cur = Vec::with_capacity(n + 2);
        cur.push(t(Cell::blank(), prev[0], prev[1])?);
        for m in 1..n {
            cur.push(t(prev[m - 1], prev[m], prev[m + 1])?);
        }
        let first = cur[0];
        cur.push(t(prev[n - 1], Cell::blank(), first)?);
        cur.push(Cell::blank());
        out.push(cur);
    }
    Ok(out)
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.states[self.initial])?;
        writeln!(f, "halt: {}", self.states[self.halt])?;
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        for (&(q, t), &(q2, a)) in &self.delta {
            let x = match a {
                Action::Write(s) => self.alphabet[s].clone(),
                Action::Left => "L".into(),
                Action::Right => "R".into(),
            };
            writeln!(f, "delta: {},{} -> {},{x}", self.states[q], self.tape_text(t), self.states[q2])?;
        }
        Ok(())
    }
}

pub mod fixtures {
    use super::TuringMachine;

    pub const HALTER: &str = "\
# halts right after leaving the left end
states: q0 qf
initial: q0
halt: qf
alphabet: _
delta: q0,$ -> qf,R
delta: q0,_ -> qf,R
";

    pub const BOUNCER: &str = "\
# steps between cells 0 and 1 forever
states: q0 q1 qf
initial: q0
halt: qf
alphabet: _
delta: q0,$ -> q1,R
delta: q0,_ -> q0,L
delta: q1,$ -> q1,R
delta: q1,_ -> q0,L
";

    pub const COUNTER: &str = "\
# appends a 1 at the right end of the block, then returns to the marker
states: q0 go write back qf
initial: q0
halt: qf
alphabet: _ 1
delta: q0,$ -> go,R
delta: q0,_ -> go,R
delta: q0,1 -> go,R
delta: go,$ -> go,R
delta: go,1 -> go,R
delta: go,_ -> write,1
delta: write,$ -> back,R
delta: write,_ -> back,L
delta: write,1 -> back,L
delta: back,1 -> back,L
delta: back,_ -> back,L
delta: back,$ -> go,R
";

    pub fn halter() -> TuringMachine {
        TuringMachine::parse(HALTER).unwrap()
    }

    pub fn bouncer() -> TuringMachine {
        TuringMachine::parse(BOUNCER).unwrap()
    }

    pub fn counter() -> TuringMachine {
        TuringMachine::parse(COUNTER).unwrap()
    }

    pub fn all() -> Vec<(&'static str, TuringMachine)> {
        vec![("halter", halter()), ("bouncer", bouncer()), ("counter", counter())]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parses_and_prints_round_trip() {
        for (_, tm) in all() {
            assert_eq!(TuringMachine::parse(&tm.to_string()).unwrap(), tm);
        }
    }

    #[test]
    fn lowercase_moves_normalize() {
        let tm = TuringMachine::parse(&HALTER.replace("qf,R", "qf,r")).unwrap();
        assert_eq!(tm, halter());
    }

    #[test]
    fn rejects_bad_machines() {
        let partial = HALTER.replace("delta: q0,_ -> qf,R\n", "");
        assert!(matches!(TuringMachine::parse(&partial), Err(TmError::Partial(_))));
        let left = HALTER.replace("q0,$ -> qf,R", "q0,$ -> qf,L");
        assert!(matches!(TuringMachine::parse(&left), Err(TmError::LeftEndNotRight(_))));
        let reserved = HALTER.replace("alphabet: _", "alphabet: _ r");
        assert!(matches!(TuringMachine::parse(&reserved), Err(TmError::Parse { line: 5, .. })));
        assert_eq!(
            TuringMachine::parse("states: q0\ninitial: q0\nhalt: q0\n"),
            Err(TmError::Missing("alphabet"))
        );
    }

    #[test]
    fn halter_run() {
        let tm = halter();
        let run = simulate(&tm, 5, Convention::Growing).unwrap();
        assert_eq!(run.len(), 2);
        assert_eq!(run[0][0], Cell::head(tm.initial, Tape::LeftEnd));
        assert_eq!(halting_time(&tm, 5), Some(2));
    }

    #[test]
    fn growing_convention_shape() {
        for (_, tm) in all() {
            for (n, c) in simulate(&tm, 12, Convention::Growing).unwrap().iter().enumerate() {
                assert_eq!(c.len(), n + 2);
                assert_eq!(*c.last().unwrap(), Cell::blank());
                assert_eq!(c.iter().filter(|x| x.state.is_some()).count(), 1);
            }
        }
    }

    #[test]
    fn fixed_convention() {
        let tm = bouncer();
        let run = simulate(&tm, 20, Convention::Fixed(3)).unwrap();
        assert_eq!(run.len(), 20);
        assert!(run.iter().all(|c| c.len() == 3));
        assert_eq!(tm.config_text(&run[1]), "$ (q1,_) _");
        assert!(matches!(simulate(&counter(), 40, Convention::Fixed(3)), Err(TmError::OutOfCells(3))));
        assert_eq!(halting_time(&bouncer(), 50), None);
    }

    #[test]
    fn tau_cases() {
        let tm = bouncer();
        let (q0, q1) = (0, 1);
        let b = Cell::blank();
        let lm = Cell::plain(Tape::LeftEnd);
        assert_eq!(tau(&tm, Cell::head(q0, Tape::LeftEnd), b, b).unwrap(), Cell::head(q1, BLANK));
        assert_eq!(tau(&tm, b, b, b).unwrap(), b);
        assert_eq!(tau(&tm, lm, Cell::head(q1, BLANK), b).unwrap(), b);
        assert_eq!(tau(&tm, lm, b, Cell::head(q1, BLANK)).unwrap(), Cell::head(q0, BLANK));
        let c = counter();
        let go = c.states.iter().position(|s| s == "go").unwrap();
        let write = c.states.iter().position(|s| s == "write").unwrap();
        assert_eq!(tau(&c, b, Cell::head(go, BLANK), b).unwrap(), Cell::head(write, Tape::Sym(1)));
        let qf = Cell::head(tm.halt, BLANK);
        assert!(tau(&tm, qf, b, b).is_err());
    }

    #[test]
    fn w_set_examples() {
        let tm = counter();
        let w = w_set(&tm);
        let lm = Cell::plain(Tape::LeftEnd);
        for &s1 in &tm.symbols() {
            for &s2 in &tm.symbols() {
                assert!(w.contains(&(lm, Cell::plain(s1), Cell::plain(s2))));
            }
        }
        assert!(w.contains(&(Cell::head(tm.initial, Tape::LeftEnd), Cell::blank(), lm)));
        assert!(w.is_superset(&w_set_displayed(&tm)));
    }

    #[test]
    fn every_occurring_triple_is_legal() {
        for (_, tm) in all() {
            let w = w_set(&tm);
            let run = simulate(&tm, 11, Convention::Growing).unwrap();
            let flat: Vec<Cell> = run.iter().flatten().copied().collect();
            for t in flat.windows(3) {
                if t.iter().all(|c| c.state != Some(tm.halt)) {
                    assert!(w.contains(&(t[0], t[1], t[2])), "{}", tm.config_text(t));
                }
            }
        }
    }

    #[test]
    fn tau_determines_the_run() {
        for (name, tm) in all() {
            let run = simulate(&tm, 11, Convention::Growing).unwrap();
            assert_eq!(reconstruct(&tm, 11).unwrap(), run, "{name}");
        }
    }
}

//! Horn-HS formulas: AST, parser, printer, desugaring, fragment classification
//! and the diagonal mirror transform.
//!
//! Surface syntax, one conjunct per `;`:
//!
//! ```text
//! p ; [U](<D~>Morning & Advanced -> false) ; [U](q -> [A](r -> !s) & t)
//! ```
//!
//! Barred relations carry a trailing `~`. `!` is accepted only in clause heads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// The twelve interval relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    A,
    ABar,
    B,
    BBar,
    E,
    EBar,
    D,
    DBar,
    L,
    LBar,
    O,
    OBar,
}

impl Rel {
    pub const ALL: [Rel; 12] = [
        Rel::A,
        Rel::ABar,
        Rel::B,
        Rel::BBar,
        Rel::E,
        Rel::EBar,
        Rel::D,
        Rel::DBar,
        Rel::L,
        Rel::LBar,
        Rel::O,
        Rel::OBar,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Pairs each relation with its barred partner.
    pub fn inverse(self) -> Rel {
        use Rel::*;
        match self {
            A => ABar,
            ABar => A,
            B => BBar,
            BBar => B,
            E => EBar,
            EBar => E,
            D => DBar,
            DBar => D,
            L => LBar,
            LBar => L,
            O => OBar,
            OBar => O,
        }
    }

    /// Image under time reversal `<x,y> -> <-y,-x>`.
    pub fn mirror(self) -> Rel {
        use Rel::*;
        match self {
            A => ABar,
            ABar => A,
            B => E,
            E => B,
            BBar => EBar,
            EBar => BBar,
            L => LBar,
            LBar => L,
            O => OBar,
            OBar => O,
            D => D,
            DBar => DBar,
        }
    }

    pub fn ascii(self) -> &'static str {
        use Rel::*;
        match self {
            A => "A",
            ABar => "A~",
            B => "B",
            BBar => "B~",
            E => "E",
            EBar => "E~",
            D => "D",
            DBar => "D~",
            L => "L",
            LBar => "L~",
            O => "O",
            OBar => "O~",
        }
    }

    pub fn from_ascii(s: &str) -> Option<Rel> {
        Rel::ALL.iter().copied().find(|r| r.ascii() == s)
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Top,
    Bot,
    Var(String),
    Dia(Rel, Box<Literal>),
    Boxed(Rel, Box<Literal>),
}

impl Literal {
    pub fn var(name: impl Into<String>) -> Literal {
        Literal::Var(name.into())
    }

    pub fn dia(r: Rel, l: Literal) -> Literal {
        Literal::Dia(r, Box::new(l))
    }

    pub fn boxed(r: Rel, l: Literal) -> Literal {
        Literal::Boxed(r, Box::new(l))
    }

    pub fn depth(&self) -> usize {
        match self {
            Literal::Dia(_, l) | Literal::Boxed(_, l) => 1 + l.depth(),
            _ => 0,
        }
    }

    pub fn has_diamond(&self) -> bool {
        match self {
            Literal::Dia(..) => true,
            Literal::Boxed(_, l) => l.has_diamond(),
            _ => false,
        }
    }

    pub fn has_box(&self) -> bool {
        match self {
            Literal::Boxed(..) => true,
            Literal::Dia(_, l) => l.has_box(),
            _ => false,
        }
    }

    /// Pushes every subliteral (including `self`) in post-order.
    pub fn subliterals_into(&self, out: &mut Vec<Literal>) {
        if let Literal::Dia(_, l) | Literal::Boxed(_, l) = self {
            l.subliterals_into(out);
        }
        out.push(self.clone());
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Literal::Var(v) => {
                out.insert(v.clone());
            }
            Literal::Dia(_, l) | Literal::Boxed(_, l) => l.vars_into(out),
            _ => {}
        }
    }

    pub fn map_rels(&self, f: &impl Fn(Rel) -> Rel) -> Literal {
        match self {
            Literal::Dia(r, l) => Literal::dia(f(*r), l.map_rels(f)),
            Literal::Boxed(r, l) => Literal::boxed(f(*r), l.map_rels(f)),
            other => other.clone(),
        }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Literal {
        match self {
            Literal::Var(v) => Literal::Var(f(v)),
            Literal::Dia(r, l) => Literal::dia(*r, l.rename(f)),
            Literal::Boxed(r, l) => Literal::boxed(*r, l.rename(f)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Top => f.write_str("true"),
            Literal::Bot => f.write_str("false"),
            Literal::Var(v) => f.write_str(v),
            Literal::Dia(r, l) => write!(f, "<{r}>{l}"),
            Literal::Boxed(r, l) => write!(f, "[{r}]{l}"),
        }
    }
}

/// Clause head. Only `Lit` survives desugaring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Lit(Literal),
    Not(Literal),
    And(Vec<Head>),
    /// `[R](body -> head)` or `<R>(body -> head)`.
    Modal {
        rel: Rel,
        diamond: bool,
        body: Vec<Literal>,
        head: Box<Head>,
    },
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Lit(l) => write!(f, "{l}"),
            Head::Not(l) => write!(f, "!{l}"),
            Head::And(hs) => {
                for (i, h) in hs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{h}")?;
                }
                Ok(())
            }
            Head::Modal {
                rel,
                diamond,
                body,
                head,
            } => {
                if *diamond {
                    write!(f, "<{rel}>(")?;
                } else {
                    write!(f, "[{rel}](")?;
                }
                write_body(f, body)?;
                write!(f, " -> {head})")
            }
        }
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[Literal]) -> fmt::Result {
    for (i, l) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// `[U](body -> head)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub body: Vec<Literal>,
    pub head: Head,
}

impl Clause {
    pub fn new(body: Vec<Literal>, head: Literal) -> Clause {
        Clause {
            body,
            head: Head::Lit(head),
        }
    }

    pub fn head_literal(&self) -> Option<&Literal> {
        match &self.head {
            Head::Lit(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[U](")?;
        write_body(f, &self.body)?;
        write!(f, " -> {})", self.head)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Formula {
    pub initial: Vec<Literal>,
    pub clauses: Vec<Clause>,
}

impl Formula {
    pub fn is_empty(&self) -> bool {
        self.initial.is_empty() && self.clauses.is_empty()
    }

    /// Literals occurring in the formula, closed under subliterals, deduplicated.
    pub fn subliterals(&self) -> BTreeSet<Literal> {
        let mut out = Vec::new();
        for l in &self.initial {
            l.subliterals_into(&mut out);
        }
        for c in &self.clauses {
            for l in &c.body {
                l.subliterals_into(&mut out);
            }
            head_literals(&c.head, &mut |l| l.subliterals_into(&mut out));
        }
        out.into_iter().collect()
    }

    /// Number of literal occurrences, counting subliterals.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut count = |l: &Literal| n += l.depth() + 1;
        for l in &self.initial {
            count(l);
        }
        for c in &self.clauses {
            for l in &c.body {
                count(l);
            }
            head_literals(&c.head, &mut count);
        }
        n
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for l in &self.initial {
            l.vars_into(&mut out);
        }
        for c in &self.clauses {
            for l in &c.body {
                l.vars_into(&mut out);
            }
            head_literals(&c.head, &mut |l| l.vars_into(&mut out));
        }
        out
    }

    pub fn max_depth(&self) -> usize {
        self.subliterals().iter().map(Literal::depth).max().unwrap_or(0)
    }

    pub fn is_desugared(&self) -> bool {
        self.clauses.iter().all(|c| matches!(c.head, Head::Lit(_)))
    }

    pub fn push(&mut self, body: Vec<Literal>, head: Literal) {
        self.clauses.push(Clause::new(body, head));
    }

    pub fn extend(&mut self, other: Formula) {
        self.initial.extend(other.initial);
        self.clauses.extend(other.clauses);
    }

    /// One conjunct per line.
    pub fn render_lines(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.conjunct_strings().into_iter().enumerate() {
            if i > 0 {
                s.push_str(" ;\n");
            }
            s.push_str(&c);
        }
        s.push('\n');
        s
    }

    fn conjunct_strings(&self) -> Vec<String> {
        self.initial
            .iter()
            .map(|l| l.to_string())
            .chain(self.clauses.iter().map(|c| c.to_string()))
            .collect()
    }
}

fn head_literals(h: &Head, f: &mut impl FnMut(&Literal)) {
    match h {
        Head::Lit(l) | Head::Not(l) => f(l),
        Head::And(hs) => hs.iter().for_each(|h| head_literals(h, f)),
        Head::Modal {
            rel,
            diamond,
            body,
            head,
        } => {
            // the modal head occurs as a literal over the (unnamed) subclause
            let _ = (rel, diamond);
            body.iter().for_each(&mut *f);
            head_literals(head, f);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.conjunct_strings().join(" ; "))
    }
}

pub fn render(f: &Formula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: unknown relation symbol `{sym}`")]
    UnknownRelation { line: usize, col: usize, sym: String },
    #[error("{line}:{col}: disjunction is not a Horn construct")]
    NonHorn { line: usize, col: usize },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept identifiers starting with `_` (fresh variables in generated files).
    pub allow_reserved: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LAngle,
    RAngle,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Semi,
    Amp,
    Arrow,
    Bang,
    Tilde,
    Pipe,
    Ident(String),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            '&' => Some(Tok::Amp),
            '!' => Some(Tok::Bang),
            '~' => Some(Tok::Tilde),
            '|' => Some(Tok::Pipe),
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Some(Tok::Arrow)
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i + adv < chars.len()
                    && (chars[i + adv].is_ascii_alphanumeric() || chars[i + adv] == '_')
                {
                    adv += 1;
                }
                Some(Tok::Ident(chars[start..start + adv].iter().collect()))
            }
            other => {
                return Err(SyntaxError::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        if let Some(tok) = tok {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
        }
        i += adv;
        col += adv;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    opts: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        if *self.peek() == Tok::Pipe {
            return Err(SyntaxError::NonHorn { line, col });
        }
        Err(SyntaxError::Parse {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = Formula::default();
        if *self.peek() == Tok::Eof {
            return self.err("empty formula");
        }
        loop {
            if self.at_univ() {
                f.clauses.push(self.clause()?);
            } else {
                f.initial.push(self.literal()?);
            }
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::Eof => break,
                _ => return self.err("expected `;` or end of input"),
            }
        }
        Ok(f)
    }

    fn at_univ(&self) -> bool {
        *self.peek() == Tok::LBrack
            && *self.peek_at(1) == Tok::Ident("U".into())
            && *self.peek_at(2) == Tok::RBrack
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        self.bump();
        self.bump();
        self.bump();
        self.expect(Tok::LParen, "`(` after [U]")?;
        let body = self.body()?;
        self.expect(Tok::Arrow, "`->`")?;
        let head = self.head()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Clause { body, head })
    }

    fn body(&mut self) -> Result<Vec<Literal>, SyntaxError> {
        let mut body = vec![self.body_literal()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            body.push(self.body_literal()?);
        }
        Ok(body)
    }

    fn body_literal(&mut self) -> Result<Literal, SyntaxError> {
        if *self.peek() == Tok::Bang {
            return self.err("negation is only allowed in clause heads");
        }
        self.literal()
    }

    fn head(&mut self) -> Result<Head, SyntaxError> {
        let mut parts = vec![self.head_atom()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.head_atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Head::And(parts)
        })
    }

    fn head_atom(&mut self) -> Result<Head, SyntaxError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Head::Not(self.literal()?));
        }
        // `[R](` or `<R>(` opens a nested implication
        let opener = self.peek().clone();
        if opener == Tok::LBrack || opener == Tok::LAngle {
            let save = self.pos;
            self.bump();
            let rel = self.rel()?;
            let close = if opener == Tok::LBrack {
                Tok::RBrack
            } else {
                Tok::RAngle
            };
            self.expect(close, "closing bracket")?;
            if *self.peek() == Tok::LParen {
                self.bump();
                let body = self.body()?;
                self.expect(Tok::Arrow, "`->`")?;
                let head = self.head()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Head::Modal {
                    rel,
                    diamond: opener == Tok::LAngle,
                    body,
                    head: Box::new(head),
                });
            }
            self.pos = save;
        }
        Ok(Head::Lit(self.literal()?))
    }

    fn rel(&mut self) -> Result<Rel, SyntaxError> {
        let (line, col) = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                s
            }
            _ => return self.err("expected a relation symbol"),
        };
        let mut sym = name.clone();
        if *self.peek() == Tok::Tilde {
            self.bump();
            sym.push('~');
        }
        Rel::from_ascii(&sym).ok_or(SyntaxError::UnknownRelation { line, col, sym })
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let (line, col) = self.here();
                self.bump();
                match s.as_str() {
                    "true" => Ok(Literal::Top),
                    "false" => Ok(Literal::Bot),
                    _ => {
                        let first = s.chars().next().unwrap();
                        if first.is_ascii_digit() || (first == '_' && !self.opts.allow_reserved) {
                            return Err(SyntaxError::Parse {
                                line,
                                col,
                                msg: format!("invalid identifier `{s}`"),
                            });
                        }
                        Ok(Literal::Var(s))
                    }
                }
            }
            Tok::LAngle => {
                self.bump();
                let r = self.rel()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Literal::dia(r, self.literal()?))
            }
            Tok::LBrack => {
                if self.at_univ() {
                    return self.err("[U] is only allowed at the top level");
                }
                self.bump();
                let r = self.rel()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Literal::boxed(r, self.literal()?))
            }
            Tok::Bang => self.err("negation is only allowed in clause heads"),
            _ => self.err("expected a literal"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    parse_formula_with(text, ParseOptions::default())
}

pub fn parse_formula_with(text: &str, opts: ParseOptions) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        opts,
    };
    p.formula()
}

pub fn parse_literal(text: &str) -> Result<Literal, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        opts: ParseOptions {
            allow_reserved: true,
        },
    };
    let l = p.literal()?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input after literal");
    }
    Ok(l)
}

// ---------------------------------------------------------------------------
// Fresh variables

pub fn fresh_var(namespace: &str, index: usize) -> String {
    format!("_{namespace}_{index}")
}

/// Deterministic fresh-name supply, one counter per namespace.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    counters: BTreeMap<String, usize>,
    taken: BTreeSet<String>,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    /// A supply that never returns a name from `taken`.
    pub fn avoiding(taken: impl IntoIterator<Item = String>) -> Fresh {
        Fresh {
            counters: BTreeMap::new(),
            taken: taken.into_iter().collect(),
        }
    }

    pub fn next(&mut self, namespace: &str) -> String {
        let n = self.counters.entry(namespace.to_string()).or_insert(0);
        loop {
            let name = fresh_var(namespace, *n);
            *n += 1;
            if !self.taken.contains(&name) {
                self.taken.insert(name.clone());
                return name;
            }
        }
    }

    pub fn next_lit(&mut self, namespace: &str) -> Literal {
        Literal::Var(self.next(namespace))
    }
}

// ---------------------------------------------------------------------------
// Desugaring

/// Rewrites sugar into plain clauses `[U](l1 & .. & lk -> l)`.
///
/// Formulas whose diamonds all sit at the front of body literals become box-only,
/// formulas whose boxes all sit at the front of head literals become diamond-only.
pub fn desugar(f: &Formula) -> Formula {
    let mut fresh = Fresh::avoiding(f.variables());
    desugar_with(f, &mut fresh)
}

pub fn desugar_with(f: &Formula, fresh: &mut Fresh) -> Formula {
    let mut flat = Vec::new();
    for c in &f.clauses {
        expand(c.body.clone(), &c.head, fresh, &mut flat);
    }

    let initial = f.initial.clone();
    let box_target = initial.iter().all(|l| !l.has_diamond())
        && flat
            .iter()
            .all(|(b, h)| !h.has_diamond() && b.iter().all(front_diamonds_only))
        && flat.iter().any(|(b, _)| b.iter().any(Literal::has_diamond));
    let any_diamond = initial.iter().any(Literal::has_diamond)
        || flat
            .iter()
            .any(|(b, h)| h.has_diamond() || b.iter().any(Literal::has_diamond));
    let dia_target = !box_target
        && any_diamond
        && initial.iter().all(|l| !l.has_box())
        && flat
            .iter()
            .all(|(b, h)| b.iter().all(|l| !l.has_box()) && front_boxes_only(h))
        && flat.iter().any(|(_, h)| h.has_box());

    let mut out = Formula {
        initial,
        clauses: Vec::new(),
    };
    for (body, head) in flat {
        if box_target {
            lift_body_diamonds(body, head, fresh, &mut out.clauses);
        } else if dia_target {
            lower_head_boxes(body, head, fresh, &mut out.clauses);
        } else {
            out.clauses.push(Clause::new(body, head));
        }
    }
    out
}

const DESUGAR_NS: &str = "ds";

fn expand(body: Vec<Literal>, head: &Head, fresh: &mut Fresh, out: &mut Vec<(Vec<Literal>, Literal)>) {
    match head {
        Head::Lit(l) => out.push((body, l.clone())),
        Head::Not(l) => {
            let mut b = body;
            b.push(l.clone());
            out.push((b, Literal::Bot));
        }
        Head::And(hs) => {
            for h in hs {
                expand(body.clone(), h, fresh, out);
            }
        }
        Head::Modal {
            rel,
            diamond,
            body: inner,
            head: h,
        } => {
            let p = fresh.next_lit(DESUGAR_NS);
            let lifted = if *diamond {
                Literal::dia(*rel, p.clone())
            } else {
                Literal::boxed(*rel, p.clone())
            };
            out.push((body, lifted));
            let mut b = vec![p];
            b.extend(inner.iter().cloned());
            expand(b, h, fresh, out);
        }
    }
}

fn front_diamonds_only(l: &Literal) -> bool {
    match l {
        Literal::Dia(_, inner) => front_diamonds_only(inner),
        other => !other.has_diamond(),
    }
}

fn front_boxes_only(l: &Literal) -> bool {
    match l {
        Literal::Boxed(_, inner) => front_boxes_only(inner),
        other => !other.has_box(),
    }
}

/// `<R>l & psi -> h` becomes `l -> [R~](psi -> h)`.
fn lift_body_diamonds(body: Vec<Literal>, head: Literal, fresh: &mut Fresh, out: &mut Vec<Clause>) {
    let Some(k) = body.iter().position(|l| matches!(l, Literal::Dia(..))) else {
        out.push(Clause::new(body, head));
        return;
    };
    let mut rest = body;
    let Literal::Dia(r, inner) = rest.remove(k) else {
        unreachable!()
    };
    if rest.is_empty() {
        lift_body_diamonds(vec![*inner], Literal::boxed(r.inverse(), head), fresh, out);
    } else {
        let p = fresh.next_lit(DESUGAR_NS);
        lift_body_diamonds(vec![*inner], Literal::boxed(r.inverse(), p.clone()), fresh, out);
        let mut b = vec![p];
        b.extend(rest);
        lift_body_diamonds(b, head, fresh, out);
    }
}

/// `psi -> [R]l` becomes `<R~>psi -> l`.
fn lower_head_boxes(body: Vec<Literal>, head: Literal, fresh: &mut Fresh, out: &mut Vec<Clause>) {
    let Literal::Boxed(r, inner) = head else {
        out.push(Clause::new(body, head));
        return;
    };
    let guard = if body.len() == 1 {
        body.into_iter().next().unwrap()
    } else {
        let p = fresh.next_lit(DESUGAR_NS);
        out.push(Clause::new(body, p.clone()));
        p
    };
    lower_head_boxes(vec![Literal::dia(r.inverse(), guard)], *inner, fresh, out);
}

// ---------------------------------------------------------------------------
// Classification and mirror

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FragmentInfo {
    pub is_horn: bool,
    pub is_core: bool,
    pub box_only: bool,
    pub diamond_only: bool,
}

impl FragmentInfo {
    pub fn name(&self) -> &'static str {
        match (self.is_core, self.box_only, self.diamond_only) {
            (_, true, true) => {
                if self.is_core {
                    "core-propositional"
                } else {
                    "horn-propositional"
                }
            }
            (true, true, false) => "box-core",
            (true, false, true) => "diamond-core",
            (true, false, false) => "core",
            (false, true, false) => "box-horn",
            (false, false, true) => "diamond-horn",
            (false, false, false) => "horn",
        }
    }
}

impl fmt::Display for FragmentInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut flags = Vec::new();
        if self.is_horn {
            flags.push("horn");
        }
        if self.is_core {
            flags.push("core");
        }
        if self.box_only {
            flags.push("box_only");
        }
        if self.diamond_only {
            flags.push("diamond_only");
        }
        write!(f, "{}", flags.join(","))
    }
}

/// Syntactic fragment flags of a formula (expected desugared).
pub fn classify(f: &Formula) -> FragmentInfo {
    let mut has_box = false;
    let mut has_dia = false;
    let mut note = |l: &Literal| {
        has_box |= l.has_box();
        has_dia |= l.has_diamond();
    };
    for l in &f.initial {
        note(l);
    }
    let mut core = true;
    for c in &f.clauses {
        c.body.iter().for_each(&mut note);
        match &c.head {
            Head::Lit(h) => {
                note(h);
                let binary = c.body.len() == 1 || (c.body.len() == 2 && *h == Literal::Bot);
                core &= binary;
            }
            other => {
                head_literals(other, &mut note);
                core = false;
            }
        }
    }
    FragmentInfo {
        is_horn: true,
        is_core: core,
        box_only: !has_dia,
        diamond_only: !has_box,
    }
}

fn mirror_head(h: &Head) -> Head {
    match h {
        Head::Lit(l) => Head::Lit(l.map_rels(&Rel::mirror)),
        Head::Not(l) => Head::Not(l.map_rels(&Rel::mirror)),
        Head::And(hs) => Head::And(hs.iter().map(mirror_head).collect()),
        Head::Modal {
            rel,
            diamond,
            body,
            head,
        } => Head::Modal {
            rel: rel.mirror(),
            diamond: *diamond,
            body: body.iter().map(|l| l.map_rels(&Rel::mirror)).collect(),
            head: Box::new(mirror_head(head)),
        },
    }
}

/// Replaces every relation by its time-reversed partner.
pub fn mirror(f: &Formula) -> Formula {
    Formula {
        initial: f.initial.iter().map(|l| l.map_rels(&Rel::mirror)).collect(),
        clauses: f
            .clauses
            .iter()
            .map(|c| Clause {
                body: c.body.iter().map(|l| l.map_rels(&Rel::mirror)).collect(),
                head: mirror_head(&c.head),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn single_variable() {
        let f = p("p");
        assert_eq!(f.initial, vec![Literal::var("p")]);
        assert!(f.clauses.is_empty());
        assert_eq!(render(&f), "p");
    }

    #[test]
    fn timetable_clause() {
        let f = p("[U](<D~> MorningSession & AdvancedCourse -> false)");
        assert_eq!(f.clauses.len(), 1);
        let c = &f.clauses[0];
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.body[0], Literal::dia(Rel::DBar, Literal::var("MorningSession")));
        assert_eq!(c.head, Head::Lit(Literal::Bot));
    }

    #[test]
    fn initial_and_clause() {
        let f = p("p ; [U]([E]p & <E>true -> p)");
        assert_eq!(f.initial.len(), 1);
        assert_eq!(f.clauses.len(), 1);
    }

    #[test]
    fn render_examples() {
        assert_eq!(Clause::new(vec![Literal::Top], Literal::var("p")).to_string(), "[U](true -> p)");
        let l = Literal::dia(Rel::A, Literal::boxed(Rel::E, Literal::Bot));
        assert_eq!(l.to_string(), "<A>[E]false");
    }

    #[test]
    fn comments_and_whitespace() {
        let f = p("# header\n p ;\n  [U]( p   ->  < B~ > q ) # trailing\n");
        assert_eq!(render(&f), "p ; [U](p -> <B~>q)");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("p ;\n  [U](q -> )") {
            Err(SyntaxError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 12)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_formula("<X>p"), Err(SyntaxError::UnknownRelation { .. })));
        assert!(matches!(parse_formula("[U](p | q -> r)"), Err(SyntaxError::NonHorn { .. })));
        assert!(parse_formula("[U](!p -> q)").is_err());
        assert!(parse_formula("!p").is_err());
        assert!(parse_formula("_x").is_err());
        assert!(parse_formula_with("_x", ParseOptions { allow_reserved: true }).is_ok());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn desugar_negated_head() {
        let f = desugar(&p("[U](a & b -> !c)"));
        assert_eq!(render(&f), "[U](a & b & c -> false)");
    }

    #[test]
    fn desugar_conjunctive_head() {
        let f = desugar(&p("[U](a -> b & c)"));
        assert_eq!(render(&f), "[U](a -> b) ; [U](a -> c)");
    }

    #[test]
    fn desugar_nested_box() {
        let f = desugar(&p("[U](a -> [B](b & c -> d))"));
        assert_eq!(render(&f), "[U](a -> [B]_ds_0) ; [U](_ds_0 & b & c -> d)");
    }

    #[test]
    fn desugar_diamond_on_body() {
        let f = desugar(&p("[U](<A>q & p -> r)"));
        assert_eq!(render(&f), "[U](q -> [A~]_ds_0) ; [U](_ds_0 & p -> r)");
        assert!(classify(&f).box_only);
        let g = desugar(&p("[U](<E~>[B][E~]p -> q)"));
        assert_eq!(render(&g), "[U]([B][E~]p -> [E]q)");
    }

    #[test]
    fn desugar_box_on_head_in_diamond_formula() {
        let f = desugar(&p("u ; [U](u -> <A>v) ; [U](v & w -> [E]x)"));
        assert_eq!(render(&f), "u ; [U](u -> <A>v) ; [U](v & w -> _ds_0) ; [U](<E~>_ds_0 -> x)");
        assert!(classify(&f).diamond_only);
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let f = desugar(&parse_formula_with("[U](_ds_0 -> [B](b -> d))", ParseOptions { allow_reserved: true }).unwrap());
        assert_eq!(render(&f), "[U](_ds_0 -> [B]_ds_1) ; [U](_ds_1 & b -> d)");
    }

    #[test]
    fn fresh_var_examples() {
        assert_eq!(fresh_var("bit", 0), "_bit_0");
        assert_eq!(fresh_var("bit", 1), "_bit_1");
        assert_eq!(fresh_var("bit", 1), fresh_var("bit", 1));
        let mut s = Fresh::new();
        assert_eq!(s.next("a"), "_a_0");
        assert_eq!(s.next("b"), "_b_0");
        assert_eq!(s.next("a"), "_a_1");
    }

    #[test]
    fn classify_examples() {
        let c = classify(&p("p ; [U](p -> q)"));
        assert!(c.is_horn && c.is_core && c.box_only && c.diamond_only);
        let c = classify(&p("[U](p & q & r -> s)"));
        assert!(c.is_horn && !c.is_core);
        let c = classify(&p("[U](p & q -> false)"));
        assert!(c.is_core);
        let c = classify(&p("[U](p & q -> r)"));
        assert!(!c.is_core);
    }

    #[test]
    fn mirror_examples() {
        let m = |s: &str| render(&mirror(&p(s)));
        assert_eq!(m("<B>p"), "<E>p");
        assert_eq!(m("[D]p"), "[D]p");
        assert_eq!(m("<L>p"), "<L~>p");
        assert_eq!(m("[U](<A>p -> [B~]q)"), "[U](<A~>p -> [E~]q)");
    }

    #[test]
    fn relation_involutions() {
        for r in Rel::ALL {
            assert_eq!(r.inverse().inverse(), r);
            assert_eq!(r.mirror().mirror(), r);
            assert_ne!(r.inverse(), r);
            assert_eq!(Rel::from_ascii(r.ascii()), Some(r));
        }
    }

    pub(crate) fn arb_rel() -> impl Strategy<Value = Rel> {
        (0usize..12).prop_map(|i| Rel::ALL[i])
    }

    pub(crate) fn arb_literal() -> impl Strategy<Value = Literal> {
        let leaf = prop_oneof![
            Just(Literal::Top),
            Just(Literal::Bot),
            "[a-e][a-z0-9_]{0,3}".prop_filter("keyword", |s| s != "true" && s != "false").prop_map(Literal::Var),
        ];
        leaf.prop_recursive(3, 12, 1, |inner| {
            prop_oneof![
                (arb_rel(), inner.clone()).prop_map(|(r, l)| Literal::dia(r, l)),
                (arb_rel(), inner).prop_map(|(r, l)| Literal::boxed(r, l)),
            ]
        })
    }

    fn arb_head() -> impl Strategy<Value = Head> {
        let leaf = prop_oneof![
            arb_literal().prop_map(Head::Lit),
            arb_literal().prop_map(Head::Not),
        ];
        leaf.prop_recursive(2, 8, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(|hs| Head::And(
                    hs.into_iter()
                        .flat_map(|h| match h {
                            Head::And(v) => v,
                            h => vec![h],
                        })
                        .collect()
                )),
                (arb_rel(), any::<bool>(), prop::collection::vec(arb_literal(), 1..3), inner).prop_map(
                    |(rel, diamond, body, head)| Head::Modal {
                        rel,
                        diamond,
                        body,
                        head: Box::new(head),
                    }
                ),
            ]
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        (
            prop::collection::vec(arb_literal(), 0..3),
            prop::collection::vec(
                (prop::collection::vec(arb_literal(), 1..4), arb_head()).prop_map(|(body, head)| Clause { body, head }),
                0..4,
            ),
        )
            .prop_filter("nonempty", |(i, c)| !i.is_empty() || !c.is_empty())
            .prop_map(|(initial, clauses)| Formula { initial, clauses })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(f in arb_formula()) {
            let text = render(&f);
            prop_assert_eq!(parse_formula(&text).unwrap(), f.clone());
            prop_assert_eq!(parse_formula(&f.render_lines()).unwrap(), f);
        }

        #[test]
        fn classify_stable_under_round_trip(f in arb_formula()) {
            let g = desugar(&f);
            let again = parse_formula_with(&render(&g), ParseOptions { allow_reserved: true }).unwrap();
            prop_assert_eq!(classify(&again), classify(&g));
        }

        #[test]
        fn desugar_output_is_plain(f in arb_formula()) {
            let g = desugar(&f);
            prop_assert!(g.is_desugared());
            prop_assert_eq!(desugar(&g.clone()), g);
        }

        #[test]
        fn mirror_is_involution(f in arb_formula()) {
            prop_assert_eq!(mirror(&mirror(&f)), f);
        }
    }
}

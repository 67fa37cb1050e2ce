//! Box-Horn satisfiability through closure over zone frames.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::oracle::{closure_finite, OracleError};
use crate::semantics::{FiniteModel, Interval, ModelFile, Semantics};
use crate::syntax::{classify, desugar, Formula, Literal};
use crate::zones::{
    build_zone_frame, enumerate_section_configs, map_interval_to_zone, pad_tails, refine, representative_order,
    unsupported_reason, OrderClass, SectionConfig, Zone, ZoneError, ZoneFrame, DEFAULT_K,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("zone closure needs a desugared box-Horn formula")]
    NotBoxHorn,
    #[error("closure derived false, there is no zone model")]
    Inconsistent,
    #[error(transparent)]
    Zone(#[from] ZoneError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Facts `literal @ zone` of a zone closure.
#[derive(Clone, Debug)]
pub struct ZoneLabels {
    pub literals: Vec<Literal>,
    /// `facts[z]` holds literal indices
    pub facts: Vec<BTreeSet<usize>>,
    pub applications: usize,
    pub bound: usize,
    bot: usize,
}

impl ZoneLabels {
    pub fn has_bot(&self) -> bool {
        self.facts.iter().any(|s| s.contains(&self.bot))
    }

    pub fn holds(&self, l: &Literal, z: usize) -> bool {
        self.literals
            .iter()
            .position(|x| x == l)
            .is_some_and(|i| self.facts[z].contains(&i))
    }
}

struct Program {
    literals: Vec<Literal>,
    /// box literals listening on each inner literal: `(box, rel index)`
    boxes_on: Vec<Vec<(usize, usize)>>,
    /// `(rel index, inner)` of each box literal
    box_parts: Vec<Option<(usize, usize)>>,
    clauses_on: Vec<Vec<usize>>,
    clause_body_len: Vec<usize>,
    clause_head: Vec<usize>,
    initial: Vec<usize>,
    top: usize,
    bot: usize,
}

fn program(f: &Formula) -> Result<Program, SolverError> {
    if !f.is_desugared() || !classify(f).box_only {
        return Err(SolverError::NotBoxHorn);
    }
    let mut set = f.subliterals();
    set.insert(Literal::Top);
    set.insert(Literal::Bot);
    let literals: Vec<Literal> = set.into_iter().collect();
    let id: HashMap<&Literal, usize> = literals.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let n = literals.len();
    let mut boxes_on = vec![Vec::new(); n];
    let mut box_parts = vec![None; n];
    for (i, l) in literals.iter().enumerate() {
        if let Literal::Boxed(r, inner) = l {
            let j = id[inner.as_ref()];
            boxes_on[j].push((i, r.index()));
            box_parts[i] = Some((r.index(), j));
        }
    }
    let mut clauses_on = vec![Vec::new(); n];
    let mut clause_body_len = Vec::new();
    let mut clause_head = Vec::new();
    for (k, c) in f.clauses.iter().enumerate() {
        let body: BTreeSet<usize> = c.body.iter().map(|l| id[l]).collect();
        for &b in &body {
            clauses_on[b].push(k);
        }
        clause_body_len.push(body.len());
        clause_head.push(id[c.head_literal().expect("desugared")]);
    }
    Ok(Program {
        initial: f.initial.iter().map(|l| id[l]).collect(),
        top: id[&Literal::Top],
        bot: id[&Literal::Bot],
        literals,
        boxes_on,
        box_parts,
        clauses_on,
        clause_body_len,
        clause_head,
    })
}

/// Worklist closure with per-(box, zone) and per-(clause, zone) counters.
pub fn zone_closure(f: &Formula, zf: &ZoneFrame) -> Result<ZoneLabels, SolverError> {
    let p = program(f)?;
    let nz = zf.len();
    let nl = p.literals.len();
    let pred: Vec<Vec<Vec<usize>>> = zf
        .succ
        .iter()
        .map(|row| {
            let mut pr = vec![Vec::new(); nz];
            for (z, succ) in row.iter().enumerate() {
                for &w in succ {
                    pr[w].push(z);
                }
            }
            pr
        })
        .collect();
    let mut has = vec![vec![false; nl]; nz];
    let mut box_count = vec![vec![0usize; nz]; nl];
    let mut clause_need: Vec<Vec<usize>> = p.clause_body_len.iter().map(|&n| vec![n; nz]).collect();
    // (literal, zone, derived by a rule)
    let mut queue: Vec<(usize, usize, bool)> = Vec::new();
    let mut applications = 0usize;

    for z in 0..nz {
        queue.push((p.top, z, false));
    }
    for &l in &p.initial {
        queue.push((l, zf.seed, false));
    }
    // vacuous boxes and bodiless clauses
    for (b, parts) in p.box_parts.iter().enumerate() {
        if let Some((r, _)) = parts {
            for z in 0..nz {
                if zf.succ[*r][z].is_empty() {
                    queue.push((b, z, true));
                }
            }
        }
    }
    for (k, &n) in p.clause_body_len.iter().enumerate() {
        if n == 0 {
            for z in 0..nz {
                queue.push((p.clause_head[k], z, true));
            }
        }
    }

    while let Some((l, z, by_rule)) = queue.pop() {
        if has[z][l] {
            continue;
        }
        has[z][l] = true;
        if by_rule {
            applications += 1;
        }
        // box propagation
        if let Some((r, inner)) = p.box_parts[l] {
            for &w in &zf.succ[r][z] {
                if !has[w][inner] {
                    queue.push((inner, w, true));
                }
            }
        }
        // box introduction
        for &(b, r) in &p.boxes_on[l] {
            for &u in &pred[r][z] {
                box_count[b][u] += 1;
                if box_count[b][u] == zf.succ[r][u].len() && !has[u][b] {
                    queue.push((b, u, true));
                }
            }
        }
        // clause firing
        for &k in &p.clauses_on[l] {
            clause_need[k][z] -= 1;
            if clause_need[k][z] == 0 && !has[z][p.clause_head[k]] {
                queue.push((p.clause_head[k], z, true));
            }
        }
    }

    let bound = nz * f.size().max(1);
    assert!(
        applications <= bound,
        "zone closure used {applications} rule applications, bound is {bound}"
    );
    Ok(ZoneLabels {
        facts: has
            .into_iter()
            .map(|row| row.into_iter().enumerate().filter(|&(_, b)| b).map(|(i, _)| i).collect())
            .collect(),
        literals: p.literals,
        applications,
        bound,
        bot: p.bot,
    })
}

pub type ZoneModel = BTreeMap<String, BTreeSet<usize>>;

#[derive(Clone, Debug)]
pub enum Verdict {
    Sat { frame: ZoneFrame, model: ZoneModel },
    Unsat,
    Unsupported(String),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Sat { .. } => 0,
            Verdict::Unsat => 1,
            Verdict::Unsupported(_) => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Sat { frame, .. } => write!(f, "SAT {}", frame.name()),
            Verdict::Unsat => write!(f, "UNSAT"),
            Verdict::Unsupported(r) => write!(f, "UNSUPPORTED {r}"),
        }
    }
}

type FrameCache = Mutex<HashMap<(OrderClass, bool, bool), Arc<Vec<ZoneFrame>>>>;

/// Zone frames of every configuration of the class, built once per process.
pub fn zone_frames(cls: OrderClass, sem: Semantics) -> Result<Arc<Vec<ZoneFrame>>, ZoneError> {
    static CACHE: OnceLock<FrameCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (cls, sem.reflexive, sem.strict);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let frames = enumerate_section_configs(cls, sem)?
        .iter()
        .map(|c| build_zone_frame(c, cls, sem))
        .collect::<Result<Vec<_>, _>>()?;
    let frames = Arc::new(frames);
    cache.lock().unwrap().insert(key, frames.clone());
    Ok(frames)
}

/// Satisfiability over the class. The formula is desugared first.
pub fn decide(f: &Formula, cls: OrderClass, sem: Semantics) -> Verdict {
    if let Some(reason) = unsupported_reason(cls, sem) {
        return Verdict::Unsupported(reason);
    }
    let g = desugar(f);
    if !classify(&g).box_only {
        return Verdict::Unsupported("formula has diamonds: Horn satisfiability with diamonds is undecidable".into());
    }
    let frames = match zone_frames(cls, sem) {
        Ok(fr) => fr,
        Err(e) => return Verdict::Unsupported(e.to_string()),
    };
    for zf in frames.iter() {
        let labels = zone_closure(&g, zf).expect("box-Horn after desugaring");
        if !labels.has_bot() {
            return Verdict::Sat {
                frame: zf.clone(),
                model: model_from_labels(&g, &labels),
            };
        }
    }
    Verdict::Unsat
}

/// Per-configuration verdicts: `(frame, satisfiable there)`.
pub fn decide_each(f: &Formula, cls: OrderClass, sem: Semantics) -> Result<Vec<(ZoneFrame, bool)>, SolverError> {
    let g = desugar(f);
    let frames = zone_frames(cls, sem)?;
    frames
        .iter()
        .map(|zf| Ok((zf.clone(), !zone_closure(&g, zf)?.has_bot())))
        .collect()
}

fn model_from_labels(f: &Formula, labels: &ZoneLabels) -> ZoneModel {
    let mut m: ZoneModel = f.variables().into_iter().map(|v| (v, BTreeSet::new())).collect();
    for (z, facts) in labels.facts.iter().enumerate() {
        for &l in facts {
            if let Literal::Var(v) = &labels.literals[l] {
                m.entry(v.clone()).or_default().insert(z);
            }
        }
    }
    m
}

pub fn extract_zone_model(f: &Formula, zf: &ZoneFrame) -> Result<ZoneModel, SolverError> {
    let labels = zone_closure(f, zf)?;
    if labels.has_bot() {
        return Err(SolverError::Inconsistent);
    }
    Ok(model_from_labels(f, &labels))
}

/// Pulls a zone model back to the representative chain with `k` points per open section.
pub fn concretize(model: &ZoneModel, zf: &ZoneFrame, k: usize) -> FiniteModel {
    let rep = representative_order(&zf.config, zf.semantics, k);
    let mut m = FiniteModel::new(rep.frame.clone());
    for (v, zones) in model {
        m.valuation.insert(v.clone(), BTreeSet::new());
        for &i in &rep.frame.intervals {
            if zones.contains(&map_interval_to_zone(zf, &rep, i)) {
                m.set(v, i);
            }
        }
    }
    m
}

/// Intervals of the representative at `k` whose closure labels differ from another
/// interval of the same zone, as `(interval, first interval of its zone)`.
pub fn uniformity_exceptions(
    f: &Formula,
    cfg: &SectionConfig,
    sem: Semantics,
    k: usize,
) -> Result<Vec<(Interval, Interval)>, OracleError> {
    let rep = representative_order(cfg, sem, k);
    let labels = closure_finite(f, &rep.frame, rep.seed())?;
    let sets = labels.label_sets();
    let mut first: BTreeMap<Zone, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (w, &i) in rep.frame.intervals.iter().enumerate() {
        let z = rep.zone_of(i);
        match first.get(&z) {
            Some(&v) if sets[v] != sets[w] => out.push((i, rep.frame.intervals[v])),
            Some(_) => {}
            None => {
                first.insert(z, w);
            }
        }
    }
    Ok(out)
}

/// Compares [`decide`] with the concrete closure on representatives at `k`.
///
/// A Sat verdict must leave the representative of its frame free of ⊥, and an Unsat
/// verdict must produce ⊥ on the representative of every configuration. Returns a
/// description of each mismatch.
pub fn oracle_agreement(f: &Formula, cls: OrderClass, sem: Semantics, k: usize) -> Result<Vec<String>, SolverError> {
    let g = desugar(f);
    let closure_bot = |zf: &ZoneFrame| -> Result<bool, SolverError> {
        let rep = representative_order(&zf.config, sem, k);
        Ok(closure_finite(&g, &rep.frame, rep.seed())?.has_bot())
    };
    let mut out = Vec::new();
    match decide(&g, cls, sem) {
        Verdict::Sat { frame, .. } => {
            if closure_bot(&frame)? {
                out.push(format!("SAT on {} but the representative closure derives false", frame.name()));
            }
        }
        Verdict::Unsat => {
            for zf in zone_frames(cls, sem)?.iter() {
                if !closure_bot(zf)? {
                    out.push(format!("UNSAT but the representative closure of {} is consistent", zf.name()));
                }
            }
        }
        Verdict::Unsupported(r) => return Err(SolverError::Unsupported(r)),
    }
    Ok(out)
}

/// Deepest modal nesting of any literal of `f`.
pub fn modal_depth(f: &Formula) -> usize {
    f.subliterals().iter().map(Literal::depth).max().unwrap_or(0)
}

/// Least refinement rounds for dumps over dense orders under the irreflexive semantics.
pub const DUMP_REFINE_DEPTH: usize = 2;

/// A concrete model of a zone model, for writing to a model file.
///
/// Over dense orders under the irreflexive semantics no finite chain is a pre-image of the
/// zone frame. The representative is then refined, and the window is restricted to the
/// points of the unrefined chain. A `reach` of [`modal_depth`] sets the refinement rounds
/// and the extra points beyond each open tail, so nested boxes evaluated from the window
/// find the successors they would find in a dense order.
pub fn dump_model(model: &ZoneModel, zf: &ZoneFrame, reach: usize) -> ModelFile {
    let rep = representative_order(&zf.config, zf.semantics, DEFAULT_K);
    let depth = if zf.class.is_dense() && !zf.semantics.reflexive {
        DUMP_REFINE_DEPTH.max(reach)
    } else {
        0
    };
    let mut cur = rep.clone();
    let mut embed: Vec<usize> = (0..rep.frame.size).collect();
    for _ in 0..depth {
        let (next, e) = refine(&cur);
        embed = embed.iter().map(|&p| e[p]).collect();
        cur = next;
    }
    if depth > 0 {
        let (next, e) = pad_tails(&cur, reach);
        embed = embed.iter().map(|&p| e[p]).collect();
        cur = next;
    }
    let mut m = FiniteModel::new(cur.frame.clone());
    for (v, zones) in model {
        m.valuation.insert(v.clone(), BTreeSet::new());
        for &i in &cur.frame.intervals {
            if zones.contains(&map_interval_to_zone(zf, &cur, i)) {
                m.set(v, i);
            }
        }
    }
    ModelFile {
        model: m,
        seed: Some(cur.seed()),
        window: (depth > 0).then_some(embed),
    }
}

/// Zone table followed by one `val VAR ZONE` line per labelled zone.
pub fn render_zone_model(zf: &ZoneFrame, model: &ZoneModel) -> String {
    let mut s = format!("# frame {}\n# seed {}\n", zf.name(), zf.zone_name(zf.seed));
    s.push_str(&zf.table_text());
    for (v, zones) in model {
        for &z in zones {
            s.push_str(&format!("val {v} {}\n", zf.zone_name(z)));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{check_model_file, eval, eval_clause};
    use crate::syntax::{parse_formula, Clause, Rel};
    use crate::zones::SectionConfig;
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        desugar(&parse_formula(s).unwrap())
    }

    fn frame(cls: OrderClass, sem: Semantics, cfg: SectionConfig) -> ZoneFrame {
        build_zone_frame(&cfg, cls, sem).unwrap()
    }

    #[test]
    fn closure_examples() {
        let zf = frame(OrderClass::Den, Semantics::IRREFLEXIVE, SectionConfig::unbounded(false));
        let l = zone_closure(&f("p ; [U](p -> false)"), &zf).unwrap();
        assert!(l.holds(&Literal::Bot, zf.seed));
        let l = zone_closure(&f("p"), &zf).unwrap();
        let total: usize = l.facts.iter().map(|s| s.len()).sum();
        assert_eq!(total, zf.len() + 1);
        let l = zone_closure(&f("[U](true -> q)"), &zf).unwrap();
        assert!((0..zf.len()).all(|z| l.holds(&Literal::var("q"), z)));
    }

    #[test]
    fn decide_examples() {
        let contradiction = f("p ; [U](p -> false)");
        assert!(matches!(decide(&contradiction, OrderClass::Den, Semantics::REFLEXIVE), Verdict::Unsat));
        let teaches = f("teaches ; [U](teaches -> [D]teaches)");
        assert!(decide(&teaches, OrderClass::Den, Semantics::IRREFLEXIVE).is_sat());
        match decide(&teaches, OrderClass::Dis, Semantics::IRREFLEXIVE) {
            Verdict::Unsupported(r) => assert!(r.contains("undecidable")),
            other => panic!("{other}"),
        }
        let dia = parse_formula("p ; [U](p -> <A>q)").unwrap();
        assert!(matches!(decide(&dia, OrderClass::Den, Semantics::REFLEXIVE), Verdict::Unsupported(_)));
        let strict = Semantics::new(true, true);
        assert!(matches!(decide(&teaches, OrderClass::Den, strict), Verdict::Unsupported(_)));
    }

    #[test]
    fn bot_away_from_seed_is_unsat() {
        let g = f("p ; [U](true -> [B]q) ; [U](q -> false)");
        assert!(matches!(decide(&g, OrderClass::Dis, Semantics::REFLEXIVE), Verdict::Unsat));
        // only the one-point order has no strict B-successors
        let each = decide_each(&g, OrderClass::Den, Semantics::IRREFLEXIVE).unwrap();
        let sat: Vec<String> = each.iter().filter(|(_, s)| *s).map(|(zf, _)| zf.config.name()).collect();
        assert_eq!(sat, vec!["a=b/none".to_string()]);
    }

    #[test]
    fn zone_model_examples() {
        let zf = frame(OrderClass::Den, Semantics::IRREFLEXIVE, SectionConfig::unbounded(false));
        let m = extract_zone_model(&f("p"), &zf).unwrap();
        assert_eq!(m["p"], [zf.seed].into());
        let m = extract_zone_model(&f("p ; [U](p -> [L]q)"), &zf).unwrap();
        let expected: BTreeSet<usize> = zf.succ[Rel::L.index()][zf.seed].iter().copied().collect();
        assert_eq!(m["q"], expected);
        assert!(extract_zone_model(&f("p ; [U](p -> false)"), &zf).is_err());
    }

    #[test]
    fn concretize_examples() {
        let zf = frame(OrderClass::Dis, Semantics::REFLEXIVE, SectionConfig::unbounded(false));
        let all: ZoneModel = [("p".to_string(), (0..zf.len()).collect())].into();
        let m = concretize(&all, &zf, 3);
        assert_eq!(m.valuation["p"].len(), m.frame.len());
        let seed_only: ZoneModel = [("p".to_string(), [zf.seed].into())].into();
        let m = concretize(&seed_only, &zf, 3);
        assert_eq!(m.valuation["p"].len(), 1);
    }

    #[test]
    fn teaches_concretizes_reflexive() {
        let g = f("teaches ; [U](teaches -> [D]teaches)");
        let Verdict::Sat { frame, model } = decide(&g, OrderClass::Den, Semantics::REFLEXIVE) else {
            panic!("expected sat");
        };
        let m = concretize(&model, &frame, 3);
        let rep = representative_order(&frame.config, frame.semantics, 3);
        assert!(eval(&m, rep.seed(), &g));
    }

    fn arb_box_horn() -> impl Strategy<Value = Formula> {
        let var = (0usize..4).prop_map(|i| Literal::var(["p", "q", "r", "s"][i]));
        let lit = var.prop_recursive(3, 6, 1, |inner| {
            (0usize..12, inner).prop_map(|(r, l)| Literal::boxed(Rel::ALL[r], l))
        });
        let lit = prop_oneof![5 => lit, 1 => Just(Literal::Top), 1 => Just(Literal::Bot)];
        let clause = (prop::collection::vec(lit.clone(), 1..3), lit.clone()).prop_map(|(b, h)| Clause::new(b, h));
        (prop::collection::vec(lit, 1..3), prop::collection::vec(clause, 1..7))
            .prop_map(|(initial, clauses)| Formula { initial, clauses })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn closure_within_bound_and_idempotent(g in arb_box_horn(), refl in any::<bool>()) {
            let sem = Semantics::new(refl, false);
            for zf in zone_frames(OrderClass::Den, sem).unwrap().iter() {
                let l = zone_closure(&g, zf).unwrap();
                prop_assert!(l.applications <= l.bound);
                // the zone model is a fixpoint: every clause holds zone-wise
                if !l.has_bot() {
                    let again = zone_closure(&g, zf).unwrap();
                    prop_assert_eq!(&again.facts, &l.facts);
                }
            }
        }

        #[test]
        fn verdict_ignores_clause_order(g in arb_box_horn(), seed in any::<u64>()) {
            let mut h = g.clone();
            let n = h.clauses.len();
            for i in 0..n {
                h.clauses.swap(i, (seed as usize).wrapping_add(i * 7) % n);
            }
            for (cls, sem) in [(OrderClass::Dis, Semantics::REFLEXIVE), (OrderClass::Den, Semantics::IRREFLEXIVE)] {
                prop_assert_eq!(decide(&g, cls, sem).to_string(), decide(&h, cls, sem).to_string());
            }
        }

        #[test]
        fn dumps_pass_in_window(g in arb_box_horn(), refl in any::<bool>()) {
            let sem = Semantics::new(refl, false);
            if let Verdict::Sat { frame, model } = decide(&g, OrderClass::Den, sem) {
                let d = desugar(&g);
                let mf = dump_model(&model, &frame, modal_depth(&d));
                let r = check_model_file(&d, &mf, None);
                prop_assert!(r.holds(), "{}", r);
            }
        }

        #[test]
        fn reflexive_sat_concretizes(g in arb_box_horn()) {
            if let Verdict::Sat { frame, model } = decide(&g, OrderClass::Dis, Semantics::REFLEXIVE) {
                let m = concretize(&model, &frame, 3);
                let rep = representative_order(&frame.config, frame.semantics, 3);
                let d = desugar(&g);
                for c in &d.clauses {
                    prop_assert!(eval_clause(&m, c));
                }
                prop_assert!(eval(&m, rep.seed(), &d));
            }
        }
    }
}

//! Zone abstractions of interval frames around a seed interval `<a,b>`.
//!
//! The timeline splits into sections `(-inf,a)`, `[a,a]`, `(a,b)`, `[b,b]`, `(b,inf)`
//! (three when `a = b`). Zones group intervals by the sections of their endpoints.
//! Relations between zones are read off finite representative chains.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::semantics::{relation_holds, FiniteFrame, Interval, Semantics};
use crate::syntax::Rel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderClass {
    Lin,
    Fin,
    Dis,
    Den,
}

impl OrderClass {
    pub const ALL: [OrderClass; 4] = [OrderClass::Lin, OrderClass::Fin, OrderClass::Dis, OrderClass::Den];

    pub fn name(self) -> &'static str {
        match self {
            OrderClass::Lin => "lin",
            OrderClass::Fin => "fin",
            OrderClass::Dis => "dis",
            OrderClass::Den => "den",
        }
    }

    pub fn parse(s: &str) -> Option<OrderClass> {
        OrderClass::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn is_dense(self) -> bool {
        self == OrderClass::Den
    }
}

impl fmt::Display for OrderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZoneError {
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

/// Why a (class, semantics) pair has no zone abstraction, if it has none.
pub fn unsupported_reason(cls: OrderClass, sem: Semantics) -> Option<String> {
    if sem.strict {
        return Some("zone frames are not built for strict semantics".into());
    }
    if sem.reflexive || cls == OrderClass::Den {
        return None;
    }
    Some(match cls {
        OrderClass::Dis | OrderClass::Fin => {
            "box-Horn satisfiability over discrete orders under irreflexive semantics is undecidable".into()
        }
        _ => "no zone abstraction for this class under irreflexive semantics".into(),
    })
}

pub fn check_supported(cls: OrderClass, sem: Semantics) -> Result<(), ZoneError> {
    match unsupported_reason(cls, sem) {
        Some(r) => Err(ZoneError::Unsupported(r)),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Left,
    A,
    Mid,
    B,
    Right,
}

impl Section {
    pub fn is_point(self) -> bool {
        matches!(self, Section::A | Section::B)
    }

    pub fn name(self, a_eq_b: bool) -> &'static str {
        match self {
            Section::Left => "(-inf,a)",
            Section::A => "[a,a]",
            Section::Mid => "(a,b)",
            Section::B => "[b,b]",
            Section::Right if a_eq_b => "(a,inf)",
            Section::Right => "(b,inf)",
        }
    }
}

/// Which sections are nonempty. Point sections always are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectionConfig {
    pub a_eq_b: bool,
    pub left: bool,
    pub mid: bool,
    pub right: bool,
}

impl SectionConfig {
    pub fn unbounded(a_eq_b: bool) -> SectionConfig {
        SectionConfig {
            a_eq_b,
            left: true,
            mid: !a_eq_b,
            right: true,
        }
    }

    pub fn sections(&self) -> Vec<Section> {
        let mut s = Vec::new();
        if self.left {
            s.push(Section::Left);
        }
        s.push(Section::A);
        if !self.a_eq_b {
            if self.mid {
                s.push(Section::Mid);
            }
            s.push(Section::B);
        }
        if self.right {
            s.push(Section::Right);
        }
        s
    }

    pub fn name(&self) -> String {
        let mut parts = Vec::new();
        if self.left {
            parts.push("left");
        }
        if self.mid {
            parts.push("mid");
        }
        if self.right {
            parts.push("right");
        }
        let seed = if self.a_eq_b { "a=b" } else { "a<b" };
        if parts.is_empty() {
            format!("{seed}/none")
        } else {
            format!("{seed}/{}", parts.join("+"))
        }
    }
}

impl fmt::Display for SectionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    Pair(Section, Section),
    Off(Section),
    Pt(Section),
}

impl Zone {
    pub fn name(&self, cfg: &SectionConfig) -> String {
        let n = |s: Section| s.name(cfg.a_eq_b);
        match *self {
            Zone::Pair(s, t) => format!("Z[{}][{}]", n(s), n(t)),
            Zone::Off(s) => format!("Zoff[{}]", n(s)),
            Zone::Pt(s) => format!("Zpt[{}]", n(s)),
        }
    }
}

/// Zones of a configuration. Irreflexive inventories split same-section intervals
/// into punctual and off-diagonal parts.
pub fn zone_inventory(cfg: &SectionConfig, sem: Semantics) -> Vec<Zone> {
    let secs = cfg.sections();
    let mut out = Vec::new();
    for (i, &s) in secs.iter().enumerate() {
        for &t in &secs[i..] {
            if s != t || sem.reflexive {
                out.push(Zone::Pair(s, t));
            } else {
                out.push(Zone::Pt(s));
                if !s.is_point() {
                    out.push(Zone::Off(s));
                }
            }
        }
    }
    out
}

pub fn zone_of(sem: Semantics, tags: &[Section], i: Interval) -> Zone {
    let (s, t) = (tags[i.start], tags[i.end]);
    if s != t || sem.reflexive {
        Zone::Pair(s, t)
    } else if i.is_punctual() {
        Zone::Pt(s)
    } else {
        Zone::Off(s)
    }
}

pub fn seed_zone(cfg: &SectionConfig, sem: Semantics) -> Zone {
    if cfg.a_eq_b {
        if sem.reflexive {
            Zone::Pair(Section::A, Section::A)
        } else {
            Zone::Pt(Section::A)
        }
    } else {
        Zone::Pair(Section::A, Section::B)
    }
}

/// All section configurations realizable in the class, up to pointed isomorphism.
pub fn enumerate_section_configs(cls: OrderClass, sem: Semantics) -> Result<Vec<SectionConfig>, ZoneError> {
    check_supported(cls, sem)?;
    Ok(all_configs(cls))
}

fn all_configs(cls: OrderClass) -> Vec<SectionConfig> {
    let mut out = Vec::new();
    for a_eq_b in [true, false] {
        for left in [false, true] {
            for right in [false, true] {
                let mids: &[bool] = match (a_eq_b, cls.is_dense()) {
                    (true, _) => &[false],
                    (false, true) => &[true],
                    (false, false) => &[false, true],
                };
                for &mid in mids {
                    out.push(SectionConfig {
                        a_eq_b,
                        left,
                        mid,
                        right,
                    });
                }
            }
        }
    }
    out
}

/// A finite chain whose points are tagged with their sections.
#[derive(Clone, Debug)]
pub struct Representative {
    pub config: SectionConfig,
    pub frame: FiniteFrame,
    pub tags: Vec<Section>,
    pub a: usize,
    pub b: usize,
}

impl Representative {
    pub fn seed(&self) -> Interval {
        Interval::new(self.a, self.b)
    }

    pub fn zone_of(&self, i: Interval) -> Zone {
        zone_of(self.frame.semantics, &self.tags, i)
    }
}

/// `k` points for every nonempty open section, one for each point section.
pub fn representative_order(cfg: &SectionConfig, sem: Semantics, k: usize) -> Representative {
    assert!(k >= 1, "need at least one point per open section");
    let mut tags = Vec::new();
    for s in cfg.sections() {
        let n = if s.is_point() { 1 } else { k };
        tags.extend(std::iter::repeat_n(s, n));
    }
    from_tags(cfg, sem, tags)
}

fn from_tags(cfg: &SectionConfig, sem: Semantics, tags: Vec<Section>) -> Representative {
    let a = tags.iter().position(|&t| t == Section::A).unwrap();
    let b = if cfg.a_eq_b {
        a
    } else {
        tags.iter().position(|&t| t == Section::B).unwrap()
    };
    Representative {
        config: *cfg,
        frame: FiniteFrame::new(tags.len(), sem),
        tags,
        a,
        b,
    }
}

/// One new point in every gap owned by an open section, including beyond open tails.
/// Returns the new tags and the position of every old point.
pub fn refine_tags(t: &[Section]) -> (Vec<Section>, Vec<usize>) {
    let mut tags = Vec::new();
    let mut embed = Vec::new();
    if t[0] == Section::Left {
        tags.push(Section::Left);
    }
    for i in 0..t.len() {
        embed.push(tags.len());
        tags.push(t[i]);
        let gap = match t.get(i + 1) {
            Some(_) if !t[i].is_point() => Some(t[i]),
            Some(&next) if !next.is_point() => Some(next),
            Some(_) => None,
            None => Some(t[i]).filter(|&s| s == Section::Right),
        };
        if let Some(s) = gap {
            tags.push(s);
        }
    }
    (tags, embed)
}

pub fn refine(rep: &Representative) -> (Representative, Vec<usize>) {
    let (tags, embed) = refine_tags(&rep.tags);
    (from_tags(&rep.config, rep.frame.semantics, tags), embed)
}

/// `n` extra points beyond each open tail. Returns the new chain and the position of every old point.
pub fn pad_tails(rep: &Representative, n: usize) -> (Representative, Vec<usize>) {
    let t = &rep.tags;
    let left = if t[0] == Section::Left { n } else { 0 };
    let mut tags = vec![Section::Left; left];
    tags.extend_from_slice(t);
    if t[t.len() - 1] == Section::Right {
        tags.extend(std::iter::repeat_n(Section::Right, n));
    }
    let embed = (0..t.len()).map(|p| p + left).collect();
    (from_tags(&rep.config, rep.frame.semantics, tags), embed)
}

/// A finite multi-modal frame over zones.
#[derive(Clone, Debug)]
pub struct ZoneFrame {
    pub class: OrderClass,
    pub semantics: Semantics,
    pub config: SectionConfig,
    pub zones: Vec<Zone>,
    /// `succ[r][z]`, sorted
    pub succ: Vec<Vec<Vec<usize>>>,
    pub seed: usize,
}

impl ZoneFrame {
    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn index_of(&self, z: Zone) -> Option<usize> {
        self.zones.iter().position(|&x| x == z)
    }

    pub fn related(&self, r: Rel, z: usize, w: usize) -> bool {
        self.succ[r.index()][z].binary_search(&w).is_ok()
    }

    pub fn zone_name(&self, z: usize) -> String {
        self.zones[z].name(&self.config)
    }

    pub fn name(&self) -> String {
        format!("{}-{}:{}", self.class, self.semantics.flavor_name(), self.config)
    }

    /// One `REL SRC DST` line per related pair.
    pub fn table_text(&self) -> String {
        let mut s = String::new();
        for r in Rel::ALL {
            for z in 0..self.len() {
                for &w in &self.succ[r.index()][z] {
                    s.push_str(&format!("{} {} {}\n", r, self.zone_name(z), self.zone_name(w)));
                }
            }
        }
        s
    }
}

/// Depth of midpoint refinement used when reading relations off dense irreflexive chains.
pub const DENSE_TABLE_DEPTH: usize = 1;

fn table_rep(cfg: &SectionConfig, cls: OrderClass, sem: Semantics, k: usize) -> Representative {
    let mut rep = representative_order(cfg, sem, k);
    if cls.is_dense() && !sem.reflexive {
        for _ in 0..DENSE_TABLE_DEPTH {
            rep = refine(&rep).0;
        }
    }
    rep
}

/// Relations read existentially off a representative.
pub fn derive_frame(cfg: &SectionConfig, cls: OrderClass, sem: Semantics, rep: &Representative) -> ZoneFrame {
    let zones = zone_inventory(cfg, sem);
    let idx = |z: Zone| zones.iter().position(|&x| x == z).expect("zone outside inventory");
    let mut sets = vec![vec![BTreeSet::new(); zones.len()]; Rel::ALL.len()];
    let f = &rep.frame;
    for (w, &i) in f.intervals.iter().enumerate() {
        let zi = idx(rep.zone_of(i));
        for r in Rel::ALL {
            for &v in f.succ_idx(r, w) {
                sets[r.index()][zi].insert(idx(rep.zone_of(f.intervals[v])));
            }
        }
    }
    ZoneFrame {
        class: cls,
        semantics: sem,
        config: *cfg,
        seed: idx(seed_zone(cfg, sem)),
        succ: sets
            .into_iter()
            .map(|row| row.into_iter().map(|s| s.into_iter().collect()).collect())
            .collect(),
        zones,
    }
}

pub const DEFAULT_K: usize = 3;

pub fn build_zone_frame(cfg: &SectionConfig, cls: OrderClass, sem: Semantics) -> Result<ZoneFrame, ZoneError> {
    check_supported(cls, sem)?;
    Ok(derive_frame(cfg, cls, sem, &table_rep(cfg, cls, sem, DEFAULT_K)))
}

/// Maps an interval of a representative to its zone index in `zf`.
pub fn map_interval_to_zone(zf: &ZoneFrame, rep: &Representative, i: Interval) -> usize {
    zf.index_of(rep.zone_of(i)).expect("zone outside inventory")
}

// ---------------------------------------------------------------------------
// p-morphism checks

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub rel: Rel,
    pub from: String,
    pub to: String,
    pub interval: Interval,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} -> {} stranded at {}",
            self.condition, self.rel, self.from, self.to, self.interval
        )
    }
}

#[derive(Clone, Debug)]
pub struct PMorphismReport {
    pub config: SectionConfig,
    pub k: usize,
    pub zones: usize,
    /// The zone table read at `k` equals the one read at `k + 1`.
    pub stable: bool,
    /// Every representative interval lands in a zone of the inventory, and every zone is hit.
    pub partition_ok: bool,
    pub violations: Vec<Violation>,
}

impl PMorphismReport {
    pub fn ok(&self) -> bool {
        self.stable && self.partition_ok && self.violations.is_empty()
    }
}

/// Maximum refinement depth when searching for a (p2) witness on dense chains.
pub const P2_REFINE_DEPTH: usize = 3;

/// Checks (p1) and (p2) of the table read at `k` against representatives at `k` and `k + 1`.
///
/// Also accepts the discrete irreflexive combination, which has no zone frame of its own,
/// to exhibit its (p2) failures under the dense inventory.
pub fn verify_pmorphism(cfg: &SectionConfig, cls: OrderClass, sem: Semantics, k: usize) -> PMorphismReport {
    let zf = derive_frame(cfg, cls, sem, &table_rep(cfg, cls, sem, k));
    let zf_next = derive_frame(cfg, cls, sem, &table_rep(cfg, cls, sem, k + 1));
    let stable = zf.succ == zf_next.succ;
    let mut violations = Vec::new();
    let rep = representative_order(cfg, sem, k);
    let mut partition_ok = true;
    let mut hit = vec![false; zf.len()];
    for &i in &rep.frame.intervals {
        match zf.index_of(rep.zone_of(i)) {
            Some(z) => hit[z] = true,
            None => partition_ok = false,
        }
    }
    partition_ok &= hit.iter().all(|&h| h);

    // (p1) on the larger representative
    let big = representative_order(cfg, sem, k + 1);
    for (w, &i) in big.frame.intervals.iter().enumerate() {
        let zi = map_interval_to_zone(&zf, &big, i);
        for r in Rel::ALL {
            for &v in big.frame.succ_idx(r, w) {
                let zj = map_interval_to_zone(&zf, &big, big.frame.intervals[v]);
                if !zf.related(r, zi, zj) {
                    violations.push(Violation {
                        condition: "p1",
                        rel: r,
                        from: zf.zone_name(zi),
                        to: zf.zone_name(zj),
                        interval: i,
                    });
                }
            }
        }
    }

    // (p2): a witness in the target zone for every interval of the source zone
    let depth = if cls.is_dense() { P2_REFINE_DEPTH } else { 0 };
    let mut levels: Vec<(Vec<Section>, Vec<usize>)> = Vec::new();
    let mut cur = (rep.tags.clone(), (0..rep.tags.len()).collect::<Vec<_>>());
    for _ in 0..depth {
        let (next, step) = refine_tags(&cur.0);
        let composed = cur.1.iter().map(|&p| step[p]).collect();
        cur = (next, composed);
        levels.push(cur.clone());
    }
    for (w, &i) in rep.frame.intervals.iter().enumerate() {
        let zi = map_interval_to_zone(&zf, &rep, i);
        for r in Rel::ALL {
            for &zj in &zf.succ[r.index()][zi] {
                let target = zf.zones[zj];
                let direct = rep
                    .frame
                    .succ_idx(r, w)
                    .iter()
                    .any(|&v| rep.zone_of(rep.frame.intervals[v]) == target);
                let found = direct
                    || levels.iter().any(|(tags, emb)| {
                        let li = Interval::new(emb[i.start], emb[i.end]);
                        has_witness(tags, sem, li, r, target)
                    });
                if !found {
                    violations.push(Violation {
                        condition: "p2",
                        rel: r,
                        from: zf.zone_name(zi),
                        to: zf.zone_name(zj),
                        interval: i,
                    });
                }
            }
        }
    }
    PMorphismReport {
        config: *cfg,
        k,
        zones: zf.len(),
        stable,
        partition_ok,
        violations,
    }
}

fn has_witness(tags: &[Section], sem: Semantics, i: Interval, r: Rel, target: Zone) -> bool {
    let n = tags.len();
    (0..n).any(|x| {
        (x..n).any(|y| {
            let j = Interval::new(x, y);
            !(sem.strict && x == y) && zone_of(sem, tags, j) == target && relation_holds(r, i, j, sem)
        })
    })
}

/// The discrete irreflexive chain `-kl..=3+kr` with `a = 0`, `b = 3`, shifted to start at 0.
pub fn integer_counterexample_rep(tail: usize) -> Representative {
    let cfg = SectionConfig::unbounded(false);
    let sem = Semantics::IRREFLEXIVE;
    let mut tags = vec![Section::Left; tail];
    tags.push(Section::A);
    tags.extend([Section::Mid, Section::Mid]);
    tags.push(Section::B);
    tags.extend(std::iter::repeat_n(Section::Right, tail));
    from_tags(&cfg, sem, tags)
}

/// (p2) failures of the dense inventory on a discrete chain, from existential relations.
pub fn discrete_p2_violations(rep: &Representative) -> Vec<Violation> {
    let sem = rep.frame.semantics;
    let zf = derive_frame(&rep.config, OrderClass::Dis, sem, rep);
    let mut out = Vec::new();
    for &i in &rep.frame.intervals {
        let zi = map_interval_to_zone(&zf, rep, i);
        for r in Rel::ALL {
            for &zj in &zf.succ[r.index()][zi] {
                if !rep.frame.successors(i, r).iter().any(|&j| rep.zone_of(j) == zf.zones[zj]) {
                    out.push(Violation {
                        condition: "p2",
                        rel: r,
                        from: zf.zone_name(zi),
                        to: zf.zone_name(zj),
                        interval: i,
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Isomorphism

/// Whether two zone frames are isomorphic, optionally respecting the seed zone.
pub fn isomorphic(x: &ZoneFrame, y: &ZoneFrame, pointed: bool) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let n = x.len();
    let sig = |f: &ZoneFrame, z: usize| -> Vec<(usize, usize, bool)> {
        Rel::ALL
            .iter()
            .map(|r| {
                let out = f.succ[r.index()][z].len();
                let inc = (0..f.len()).filter(|&w| f.related(*r, w, z)).count();
                (out, inc, f.related(*r, z, z))
            })
            .collect()
    };
    let sx: Vec<_> = (0..n).map(|z| sig(x, z)).collect();
    let sy: Vec<_> = (0..n).map(|z| sig(y, z)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        z: usize,
        x: &ZoneFrame,
        y: &ZoneFrame,
        sx: &[Vec<(usize, usize, bool)>],
        sy: &[Vec<(usize, usize, bool)>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        pointed: bool,
    ) -> bool {
        let n = x.len();
        if z == n {
            return true;
        }
        for c in 0..n {
            if used[c] || sx[z] != sy[c] || (pointed && (z == x.seed) != (c == y.seed)) {
                continue;
            }
            let consistent = (0..z).all(|p| {
                Rel::ALL.iter().all(|&r| {
                    x.related(r, z, p) == y.related(r, c, map[p]) && x.related(r, p, z) == y.related(r, map[p], c)
                })
            });
            if !consistent {
                continue;
            }
            map[z] = c;
            used[c] = true;
            if extend(z + 1, x, y, sx, sy, map, used, pointed) {
                return true;
            }
            used[c] = false;
        }
        false
    }
    extend(0, x, y, &sx, &sy, &mut map, &mut used, pointed)
}

/// Zone frames of the class grouped into isomorphism classes (seed ignored).
pub fn frame_classes(cls: OrderClass, sem: Semantics) -> Result<Vec<Vec<SectionConfig>>, ZoneError> {
    let mut classes: Vec<(ZoneFrame, Vec<SectionConfig>)> = Vec::new();
    for cfg in enumerate_section_configs(cls, sem)? {
        let zf = build_zone_frame(&cfg, cls, sem)?;
        match classes.iter_mut().find(|(rep, _)| isomorphic(rep, &zf, false)) {
            Some((_, members)) => members.push(cfg),
            None => classes.push((zf, vec![cfg])),
        }
    }
    Ok(classes.into_iter().map(|(_, m)| m).collect())
}

/// Golden file name for a configuration table.
pub fn golden_name(cls: OrderClass, sem: Semantics, cfg: &SectionConfig) -> String {
    let flag = |b: bool, c: char| if b { c } else { '-' };
    format!(
        "{}-{}-{}-{}{}{}.txt",
        cls,
        sem.flavor_name(),
        if cfg.a_eq_b { "eq" } else { "lt" },
        flag(cfg.left, 'l'),
        flag(cfg.mid, 'm'),
        flag(cfg.right, 'r')
    )
}

/// Whether `i` and `j` are related by `r` in the representative, for tests.
pub fn rep_related(rep: &Representative, r: Rel, i: Interval, j: Interval) -> bool {
    relation_holds(r, i, j, rep.frame.semantics)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFL: Semantics = Semantics::REFLEXIVE;
    const IRR: Semantics = Semantics::IRREFLEXIVE;

    #[test]
    fn inventory_sizes() {
        assert_eq!(zone_inventory(&SectionConfig::unbounded(false), REFL).len(), 15);
        assert_eq!(zone_inventory(&SectionConfig::unbounded(true), REFL).len(), 6);
        assert_eq!(zone_inventory(&SectionConfig::unbounded(false), IRR).len(), 18);
        assert_eq!(zone_inventory(&SectionConfig::unbounded(true), IRR).len(), 8);
    }

    #[test]
    fn representative_sizes() {
        assert_eq!(representative_order(&SectionConfig::unbounded(false), IRR, 3).tags.len(), 11);
        let bare = SectionConfig {
            a_eq_b: true,
            left: false,
            mid: false,
            right: false,
        };
        assert_eq!(representative_order(&bare, IRR, 3).tags.len(), 1);
        let no_mid = SectionConfig {
            a_eq_b: false,
            left: true,
            mid: false,
            right: true,
        };
        assert_eq!(representative_order(&no_mid, REFL, 3).tags.len(), 8);
    }

    #[test]
    fn dense_configs_force_middle() {
        let cfgs = enumerate_section_configs(OrderClass::Den, REFL).unwrap();
        assert!(cfgs.iter().all(|c| c.a_eq_b || c.mid));
        assert!(cfgs.contains(&SectionConfig::unbounded(true)));
        assert_eq!(cfgs.len(), 8);
        assert_eq!(enumerate_section_configs(OrderClass::Dis, REFL).unwrap().len(), 12);
        assert!(enumerate_section_configs(OrderClass::Dis, IRR).is_err());
    }

    #[test]
    fn zone_mapping_examples() {
        let cfg = SectionConfig::unbounded(false);
        let rep = representative_order(&cfg, IRR, 3);
        assert_eq!(rep.zone_of(Interval::new(rep.a, rep.a)), Zone::Pt(Section::A));
        assert_eq!(rep.zone_of(Interval::new(0, 1)), Zone::Off(Section::Left));
        let rr = representative_order(&cfg, REFL, 3);
        assert_eq!(rr.zone_of(Interval::new(rr.a + 1, rr.b)), Zone::Pair(Section::Mid, Section::B));
        let zf = build_zone_frame(&cfg, OrderClass::Dis, REFL).unwrap();
        assert_eq!(zf.zones[zf.seed], Zone::Pair(Section::A, Section::B));
        assert_eq!(zf.zone_name(zf.seed), "Z[[a,a]][[b,b]]");
    }

    #[test]
    fn refine_keeps_embedding() {
        let rep = representative_order(&SectionConfig::unbounded(false), IRR, 2);
        let (r2, emb) = refine(&rep);
        for (i, &e) in emb.iter().enumerate() {
            assert_eq!(r2.tags[e], rep.tags[i]);
        }
        // every open-section gap and both open ends receive a point
        assert_eq!(r2.tags.len(), 17);
        assert_eq!(r2.tags[r2.a], Section::A);
    }

    #[test]
    fn pmorphism_supported() {
        for (cls, sem) in [
            (OrderClass::Dis, REFL),
            (OrderClass::Den, REFL),
            (OrderClass::Den, IRR),
            (OrderClass::Lin, REFL),
        ] {
            for cfg in enumerate_section_configs(cls, sem).unwrap() {
                for k in [3, 4] {
                    let r = verify_pmorphism(&cfg, cls, sem, k);
                    assert!(r.ok(), "{cls} {sem} {cfg} k={k}: {:?}", r.violations.first());
                }
            }
        }
    }

    #[test]
    fn discrete_irreflexive_counterexample() {
        let rep = integer_counterexample_rep(2);
        let a = rep.a;
        let v = discrete_p2_violations(&rep);
        let hit = |r: Rel, x: usize| {
            v.iter().any(|w| {
                w.rel == r && w.from == "Zpt[(a,b)]" && w.to == "Zoff[(a,b)]" && w.interval == Interval::new(a + x, a + x)
            })
        };
        assert!(hit(Rel::EBar, 1));
        assert!(hit(Rel::BBar, 2));
        assert!(!hit(Rel::EBar, 2));
    }

    #[test]
    fn frame_class_counts() {
        let count = |c, s| frame_classes(c, s).unwrap().len();
        assert_eq!(count(OrderClass::Dis, REFL), 5);
        assert_eq!(count(OrderClass::Den, REFL), 5);
        assert_eq!(count(OrderClass::Den, IRR), 8);
        assert_eq!(count(OrderClass::Lin, REFL), 5);
    }

    #[test]
    fn configs_pairwise_non_isomorphic_when_pointed() {
        for (cls, sem) in [(OrderClass::Dis, REFL), (OrderClass::Den, IRR)] {
            let frames: Vec<_> = enumerate_section_configs(cls, sem)
                .unwrap()
                .iter()
                .map(|c| build_zone_frame(c, cls, sem).unwrap())
                .collect();
            for i in 0..frames.len() {
                for j in 0..frames.len() {
                    assert_eq!(isomorphic(&frames[i], &frames[j], true), i == j);
                }
            }
        }
    }
}

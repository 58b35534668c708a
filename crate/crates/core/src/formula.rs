//! Pseudo-Boolean constraint specifications.
//!
//! A [`Spec`] is an ordered list of linear constraints over Boolean literals.
//! [`half_reify`] guards every constraint `c` with a fresh indicator `a_c`
//! so that assuming a set of indicators selects a subset of constraints.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// Set of constraint ids, kept sorted so that it doubles as a canonical key.
pub type ConstraintSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable x{var} occurs twice in one constraint")]
    DuplicateLiteral { line: usize, var: u32 },
    #[error("coefficient of x{0} is zero")]
    ZeroCoefficient(u32),
    #[error("variable x{0} occurs twice in one constraint")]
    RepeatedVariable(u32),
    #[error("unknown constraint id {0}")]
    UnknownConstraint(usize),
    #[error("invalid constraint label {0:?}")]
    InvalidLabel(String),
    #[error("duplicate constraint label {0:?}")]
    DuplicateLabel(String),
    #[error("variable x{0} assigned both polarities")]
    ConflictingAssignment(u32),
}

/// Boolean variable, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A variable or its negation, packed as `var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var().0 + 1)
        } else {
            write!(f, "~x{}", self.var().0 + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: i64,
    pub lit: Lit,
}

/// `sum(coef * lit) <relation> bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConstraint {
    pub id: usize,
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub bound: i64,
}

impl LinConstraint {
    /// Builds a constraint, rejecting zero coefficients and repeated variables.
    pub fn new(
        id: usize,
        terms: Vec<Term>,
        relation: Relation,
        bound: i64,
    ) -> Result<Self, FormulaError> {
        let mut seen = HashSet::with_capacity(terms.len());
        for t in &terms {
            if t.coef == 0 {
                return Err(FormulaError::ZeroCoefficient(t.lit.var().0 + 1));
            }
            if !seen.insert(t.lit.var()) {
                return Err(FormulaError::RepeatedVariable(t.lit.var().0 + 1));
            }
        }
        Ok(LinConstraint {
            id,
            terms,
            relation,
            bound,
        })
    }

    /// Unit-coefficient `sum(lits) >= 1`.
    pub fn clause(id: usize, lits: &[Lit]) -> Result<Self, FormulaError> {
        let terms = lits.iter().map(|&lit| Term { coef: 1, lit }).collect();
        LinConstraint::new(id, terms, Relation::Ge, 1)
    }

    pub fn is_clause(&self) -> bool {
        self.relation == Relation::Ge && self.bound == 1 && self.terms.iter().all(|t| t.coef == 1)
    }

    pub fn max_var(&self) -> Option<Var> {
        self.terms.iter().map(|t| t.lit.var()).max()
    }

    /// Value of the left-hand side under a total assignment given as a closure.
    pub fn lhs(&self, mut value: impl FnMut(Lit) -> bool) -> i64 {
        self.terms
            .iter()
            .filter(|t| value(t.lit))
            .map(|t| t.coef)
            .sum()
    }

    pub fn holds(&self, lhs: i64) -> bool {
        match self.relation {
            Relation::Ge => lhs >= self.bound,
            Relation::Le => lhs <= self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }

    /// Normalized `>=` forms with strictly positive, saturated coefficients.
    /// Tautological forms are dropped, so a trivially true constraint yields
    /// an empty list. Equalities yield up to two forms.
    pub fn ge_forms(&self) -> Vec<PbGe> {
        let mut out = Vec::with_capacity(2);
        let sides: &[i64] = match self.relation {
            Relation::Ge => &[1],
            Relation::Le => &[-1],
            Relation::Eq => &[1, -1],
        };
        for &sign in sides {
            let mut degree = sign * self.bound;
            let mut terms = Vec::with_capacity(self.terms.len());
            for t in &self.terms {
                let c = sign * t.coef;
                if c > 0 {
                    terms.push((c, t.lit));
                } else {
                    // c*l = c - c*~l
                    degree -= c;
                    terms.push((-c, !t.lit));
                }
            }
            if degree <= 0 {
                continue;
            }
            let terms = terms
                .into_iter()
                .map(|(c, l)| (c.min(degree) as u64, l))
                .collect();
            out.push(PbGe {
                terms,
                degree: degree as u64,
            });
        }
        out
    }
}

/// Normalized pseudo-Boolean constraint `sum(w * lit) >= degree`, `w > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PbGe {
    pub terms: Vec<(u64, Lit)>,
    pub degree: u64,
}

impl PbGe {
    pub fn is_clause(&self) -> bool {
        self.degree == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Satisfied,
    Violated,
    Undetermined,
}

/// Partial assignment: the set of literals assigned true.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Result<Self, FormulaError> {
        let mut a = Assignment::new();
        for l in lits {
            if a.value(l) == Some(false) {
                return Err(FormulaError::ConflictingAssignment(l.var().0 + 1));
            }
            a.set(l);
        }
        Ok(a)
    }

    /// Makes `lit` true, overriding any previous value of its variable.
    pub fn set(&mut self, lit: Lit) {
        let i = lit.var().index();
        if i >= self.values.len() {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(lit.is_positive());
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values
            .get(lit.var().index())
            .copied()
            .flatten()
            .map(|v| v == lit.is_positive())
    }

    pub fn is_true(&self, lit: Lit) -> bool {
        self.value(lit) == Some(true)
    }

    /// Literals assigned true, in variable order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Lit::new(Var(i as u32), b)))
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// Reachable free sums are tracked exactly up to this many distinct values.
const EQ_REACH_LIMIT: usize = 1 << 16;

/// Three-valued evaluation of `c` over all total extensions of `alpha`.
pub fn eval_constraint(c: &LinConstraint, alpha: &Assignment) -> Truth {
    let mut fixed = 0i64;
    let mut lo = 0i64;
    let mut hi = 0i64;
    let mut free = Vec::new();
    for t in &c.terms {
        match alpha.value(t.lit) {
            Some(true) => fixed += t.coef,
            Some(false) => {}
            None => {
                lo += t.coef.min(0);
                hi += t.coef.max(0);
                free.push(t.coef);
            }
        }
    }
    let (lo, hi) = (fixed + lo, fixed + hi);
    match c.relation {
        Relation::Ge if lo >= c.bound => Truth::Satisfied,
        Relation::Ge if hi < c.bound => Truth::Violated,
        Relation::Le if hi <= c.bound => Truth::Satisfied,
        Relation::Le if lo > c.bound => Truth::Violated,
        Relation::Eq if lo == c.bound && hi == c.bound => Truth::Satisfied,
        Relation::Eq if c.bound < lo || c.bound > hi => Truth::Violated,
        Relation::Eq => match eq_reachable(fixed, &free, c.bound) {
            Some(false) => Truth::Violated,
            _ => Truth::Undetermined,
        },
        _ => Truth::Undetermined,
    }
}

/// Whether `target` is a reachable sum; `None` when the search gets too wide.
fn eq_reachable(fixed: i64, free: &[i64], target: i64) -> Option<bool> {
    let mut sums = HashSet::from([fixed]);
    for &c in free {
        let next: Vec<i64> = sums.iter().map(|s| s + c).collect();
        sums.extend(next);
        if sums.len() > EQ_REACH_LIMIT {
            return None;
        }
    }
    Some(sums.contains(&target))
}

/// Ordered constraint list; constraint ids equal positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Spec {
    pub constraints: Vec<LinConstraint>,
    pub num_vars: u32,
    pub names: Vec<Option<String>>,
}

impl Spec {
    pub fn new(num_vars: u32) -> Self {
        Spec {
            num_vars,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Appends a constraint and returns its id.
    pub fn add(
        &mut self,
        terms: Vec<Term>,
        relation: Relation,
        bound: i64,
        name: Option<String>,
    ) -> Result<usize, FormulaError> {
        if let Some(n) = &name {
            if !valid_label(n) {
                return Err(FormulaError::InvalidLabel(n.clone()));
            }
            if self.names.iter().flatten().any(|m| m == n) {
                return Err(FormulaError::DuplicateLabel(n.clone()));
            }
        }
        let id = self.constraints.len();
        let c = LinConstraint::new(id, terms, relation, bound)?;
        if let Some(v) = c.max_var() {
            self.num_vars = self.num_vars.max(v.0 + 1);
        }
        self.constraints.push(c);
        self.names.push(name);
        Ok(id)
    }

    /// Name of a constraint; unnamed constraints are `c<id+1>`.
    pub fn label(&self, id: usize) -> String {
        match self.names.get(id) {
            Some(Some(n)) => n.clone(),
            _ => format!("c{}", id + 1),
        }
    }

    pub fn label_index(&self) -> HashMap<String, usize> {
        (0..self.len()).map(|i| (self.label(i), i)).collect()
    }

    pub fn labels(&self, set: &ConstraintSet) -> Vec<String> {
        set.iter().map(|&i| self.label(i)).collect()
    }

    pub fn all_ids(&self) -> ConstraintSet {
        (0..self.len()).collect()
    }

    /// The sub-specification made of `subset`, renumbered densely, together
    /// with the map from new ids back to ids of `self`.
    pub fn restrict(&self, subset: &ConstraintSet) -> (Spec, Vec<usize>) {
        let mut sub = Spec::new(self.num_vars);
        let mut back = Vec::with_capacity(subset.len());
        for &id in subset {
            let c = &self.constraints[id];
            let new_id = sub.constraints.len();
            sub.constraints.push(LinConstraint {
                id: new_id,
                ..c.clone()
            });
            sub.names.push(self.names[id].clone());
            back.push(id);
        }
        (sub, back)
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|ch| !ch.is_whitespace() && !matches!(ch, '(' | ')' | '{' | '}' | ';'))
}

fn syntax(line: usize, msg: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_lit(tok: &str, line: usize) -> Result<Lit, FormulaError> {
    let (positive, rest) = match tok.strip_prefix('~') {
        Some(r) => (false, r),
        None => (true, tok),
    };
    let idx = rest
        .strip_prefix('x')
        .and_then(|d| d.parse::<u32>().ok())
        .filter(|&v| v >= 1)
        .ok_or_else(|| syntax(line, format!("expected literal, found {tok:?}")))?;
    Ok(Lit::new(Var(idx - 1), positive))
}

fn parse_int(tok: &str, line: usize, what: &str) -> Result<i64, FormulaError> {
    let digits = tok.strip_prefix('+').unwrap_or(tok);
    digits
        .parse::<i64>()
        .map_err(|_| syntax(line, format!("expected {what}, found {tok:?}")))
}

/// Parses the OPB subset: one constraint per line, `* label: NAME` comments
/// naming the next constraint, other `*` lines ignored apart from an optional
/// `#variable=` header.
pub fn parse_spec(text: &str) -> Result<Spec, FormulaError> {
    let mut spec = Spec::new(0);
    let mut pending: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('*') {
            let comment = comment.trim();
            if let Some(name) = comment.strip_prefix("label:") {
                let name = name.trim();
                if !valid_label(name) {
                    return Err(syntax(line_no, format!("invalid label {name:?}")));
                }
                pending = Some(name.to_string());
            } else if let Some(pos) = comment.find("#variable=") {
                let n = comment[pos + "#variable=".len()..]
                    .split_whitespace()
                    .next()
                    .and_then(|t| t.parse::<u32>().ok())
                    .ok_or_else(|| syntax(line_no, "malformed #variable= header"))?;
                spec.num_vars = spec.num_vars.max(n);
            }
            continue;
        }
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| syntax(line_no, "constraint must end with ';'"))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let rel_pos = toks
            .iter()
            .position(|t| matches!(*t, ">=" | "<=" | "="))
            .ok_or_else(|| syntax(line_no, "missing relation"))?;
        let relation = match toks[rel_pos] {
            ">=" => Relation::Ge,
            "<=" => Relation::Le,
            _ => Relation::Eq,
        };
        if toks.len() != rel_pos + 2 {
            return Err(syntax(line_no, "expected a single integer after the relation"));
        }
        let bound = parse_int(toks[rel_pos + 1], line_no, "bound")?;
        let lhs = &toks[..rel_pos];
        if lhs.is_empty() || !lhs.len().is_multiple_of(2) {
            return Err(syntax(line_no, "expected `<coef> <literal>` pairs"));
        }
        let mut terms = Vec::with_capacity(lhs.len() / 2);
        let mut seen = HashSet::new();
        for pair in lhs.chunks(2) {
            let coef = parse_int(pair[0], line_no, "coefficient")?;
            if coef == 0 {
                return Err(syntax(line_no, "zero coefficient"));
            }
            let lit = parse_lit(pair[1], line_no)?;
            if !seen.insert(lit.var()) {
                return Err(FormulaError::DuplicateLiteral {
                    line: line_no,
                    var: lit.var().0 + 1,
                });
            }
            terms.push(Term { coef, lit });
        }
        let name = pending.take();
        spec.add(terms, relation, bound, name).map_err(|e| match e {
            FormulaError::DuplicateLabel(n) => syntax(line_no, format!("duplicate label {n:?}")),
            other => other,
        })?;
    }
    Ok(spec)
}

/// Emits the format read by [`parse_spec`]; deterministic.
pub fn write_spec(spec: &Spec) -> String {
    let mut out = format!(
        "* #variable= {} #constraint= {}\n",
        spec.num_vars,
        spec.len()
    );
    for c in &spec.constraints {
        if let Some(Some(name)) = spec.names.get(c.id) {
            out.push_str(&format!("* label: {name}\n"));
        }
        for t in &c.terms {
            out.push_str(&format!("{:+} {} ", t.coef, t.lit));
        }
        out.push_str(&format!("{} {} ;\n", c.relation.as_str(), c.bound));
    }
    out
}

/// A spec whose constraints are guarded by indicators: `a_c -> c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfReifiedSpec {
    pub base: Spec,
    /// `indicators[c]` guards constraint `c`; ids follow the base variables.
    pub indicators: Vec<Var>,
}

pub fn half_reify(spec: &Spec) -> HalfReifiedSpec {
    let indicators = (0..spec.len())
        .map(|c| Var(spec.num_vars + c as u32))
        .collect();
    HalfReifiedSpec {
        base: spec.clone(),
        indicators,
    }
}

impl HalfReifiedSpec {
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn num_base_vars(&self) -> u32 {
        self.base.num_vars
    }

    pub fn num_vars(&self) -> u32 {
        self.base.num_vars + self.indicators.len() as u32
    }

    pub fn indicator(&self, c: usize) -> Var {
        self.indicators[c]
    }

    /// Constraint guarded by `v`, if `v` is an indicator.
    pub fn constraint_of(&self, v: Var) -> Option<usize> {
        let c = v.0.checked_sub(self.base.num_vars)? as usize;
        (c < self.indicators.len()).then_some(c)
    }

    /// Normalized guarded forms of constraint `c`: `degree * ~a_c + sum >= degree`.
    pub fn guarded_forms(&self, c: usize) -> Vec<PbGe> {
        let guard = self.indicators[c].neg();
        self.base.constraints[c]
            .ge_forms()
            .into_iter()
            .map(|mut f| {
                f.terms.push((f.degree, guard));
                f
            })
            .collect()
    }
}

/// Indicator assumptions selecting `subset`: `a_c` for members and, when
/// `negative` is set, `~a_c` for every other constraint.
pub fn subset_assumptions(
    h: &HalfReifiedSpec,
    subset: &ConstraintSet,
    negative: bool,
) -> Result<Vec<Lit>, FormulaError> {
    if let Some(&bad) = subset.iter().find(|&&c| c >= h.len()) {
        return Err(FormulaError::UnknownConstraint(bad));
    }
    let mut out = Vec::with_capacity(if negative { h.len() } else { subset.len() });
    for c in 0..h.len() {
        if subset.contains(&c) {
            out.push(h.indicator(c).pos());
        } else if negative {
            out.push(h.indicator(c).neg());
        }
    }
    Ok(out)
}

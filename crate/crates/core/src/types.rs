//! Built-in types, typedef chain resolution and value-space checking.
//!
//! A derived type may only narrow its base: restrictions accumulate by
//! intersection along the typedef chain, and `check_restriction_subset`
//! verifies each declared restriction against the space it refines.

use crate::ast::{Bound, RangeInterval, Restriction, TypeSpec, Typedef};
use crate::diag::DiagCode;
use crate::span::SourceSpan;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseType {
    Int8,
    Int16,
    Int32,
    Int64,
    Uint8,
    Uint16,
    Uint32,
    Uint64,
    Float32,
    Float64,
    String,
    Boolean,
    Enumeration,
    Bits,
    Keyref,
    Empty,
    Binary,
}

impl BaseType {
    pub fn from_name(name: &str) -> Option<BaseType> {
        use BaseType::*;
        Some(match name {
            "int8" => Int8,
            "int16" => Int16,
            "int32" => Int32,
            "int64" => Int64,
            "uint8" => Uint8,
            "uint16" => Uint16,
            "uint32" => Uint32,
            "uint64" => Uint64,
            "float32" => Float32,
            "float64" => Float64,
            "string" => String,
            "boolean" => Boolean,
            "enumeration" => Enumeration,
            "bits" => Bits,
            "keyref" => Keyref,
            "empty" => Empty,
            "binary" => Binary,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        use BaseType::*;
        match self {
            Int8 => "int8",
            Int16 => "int16",
            Int32 => "int32",
            Int64 => "int64",
            Uint8 => "uint8",
            Uint16 => "uint16",
            Uint32 => "uint32",
            Uint64 => "uint64",
            Float32 => "float32",
            Float64 => "float64",
            String => "string",
            Boolean => "boolean",
            Enumeration => "enumeration",
            Bits => "bits",
            Keyref => "keyref",
            Empty => "empty",
            Binary => "binary",
        }
    }

    /// Two's-complement / unsigned bounds for the integer types.
    pub fn int_bounds(self) -> Option<(i128, i128)> {
        use BaseType::*;
        Some(match self {
            Int8 => (i8::MIN as i128, i8::MAX as i128),
            Int16 => (i16::MIN as i128, i16::MAX as i128),
            Int32 => (i32::MIN as i128, i32::MAX as i128),
            Int64 => (i64::MIN as i128, i64::MAX as i128),
            Uint8 => (0, u8::MAX as i128),
            Uint16 => (0, u16::MAX as i128),
            Uint32 => (0, u32::MAX as i128),
            Uint64 => (0, u64::MAX as i128),
            _ => return None,
        })
    }

    pub fn is_integer(self) -> bool {
        self.int_bounds().is_some()
    }

    pub fn is_float(self) -> bool {
        matches!(self, BaseType::Float32 | BaseType::Float64)
    }

    /// The intrinsic numeric value space, where one exists.
    pub fn numeric_bounds(self) -> Option<(Number, Number)> {
        if let Some((lo, hi)) = self.int_bounds() {
            return Some((Number::Int(lo), Number::Int(hi)));
        }
        match self {
            BaseType::Float32 => Some((
                Number::Dec(f32::MIN as f64),
                Number::Dec(f32::MAX as f64),
            )),
            BaseType::Float64 => Some((Number::Dec(f64::MIN), Number::Dec(f64::MAX))),
            _ => None,
        }
    }
}

/// A numeric value in range arithmetic. Integer endpoints stay exact;
/// decimal endpoints compare by their parsed `f64` value, no epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Int(i128),
    Dec(f64),
}

impl Number {
    pub fn as_f64(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Dec(d) => d,
        }
    }

    pub fn cmp_num(self, other: Number) -> Ordering {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a.cmp(&b),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn le(self, other: Number) -> bool {
        self.cmp_num(other) != Ordering::Greater
    }

    pub fn lt(self, other: Number) -> bool {
        self.cmp_num(other) == Ordering::Less
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{}", i),
            Number::Dec(d) => write!(f, "{}", d),
        }
    }
}

/// A closed interval of the numeric (or length) domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Number,
    pub hi: Number,
}

impl Interval {
    pub fn new(lo: Number, hi: Number) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, n: Number) -> bool {
        self.lo.le(n) && n.le(self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    /// Numeric ranges; decimal endpoints allowed.
    Range,
    /// Length ranges; non-negative integers only.
    Length,
}

/// Parse a range/length argument: `|`-separated intervals, each `lo .. hi`
/// or a single value, with `min`/`max` standing for the base type bounds.
pub fn parse_range_text(text: &str, kind: RangeKind) -> Result<Vec<RangeInterval>, String> {
    let mut out = Vec::new();
    for piece in text.split('|') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err("empty interval".to_string());
        }
        let (lo, hi) = match piece.split_once("..") {
            Some((a, b)) => (
                parse_bound(a.trim(), kind)?,
                parse_bound(b.trim(), kind)?,
            ),
            None => {
                let b = parse_bound(piece, kind)?;
                (b, b)
            }
        };
        out.push(RangeInterval { lo, hi });
    }
    let last = out.len() - 1;
    for (idx, iv) in out.iter().enumerate() {
        if matches!(iv.lo, Bound::Min) && idx != 0 {
            return Err("`min` may only appear in the first interval".to_string());
        }
        if matches!(iv.hi, Bound::Min) && !(idx == 0 && matches!(iv.lo, Bound::Min)) {
            return Err("`min` cannot be an upper bound".to_string());
        }
        if matches!(iv.hi, Bound::Max) && idx != last {
            return Err("`max` may only appear in the last interval".to_string());
        }
        if matches!(iv.lo, Bound::Max) && !(idx == last && matches!(iv.hi, Bound::Max)) {
            return Err("`max` cannot be a lower bound".to_string());
        }
        if let (Some(a), Some(b)) = (bound_num(iv.lo), bound_num(iv.hi)) {
            if !a.le(b) {
                return Err(format!("descending interval {} .. {}", a, b));
            }
        }
    }
    for w in out.windows(2) {
        if let (Some(a), Some(b)) = (bound_num(w[0].hi), bound_num(w[1].lo)) {
            if !a.lt(b) {
                return Err("intervals must be disjoint and ascending".to_string());
            }
        }
    }
    Ok(out)
}

fn parse_bound(s: &str, kind: RangeKind) -> Result<Bound, String> {
    match s {
        "min" => return Ok(Bound::Min),
        "max" => return Ok(Bound::Max),
        _ => {}
    }
    if let Ok(i) = s.parse::<i128>() {
        if kind == RangeKind::Length && i < 0 {
            return Err(format!("length bound {} is negative", i));
        }
        return Ok(Bound::Int(i));
    }
    if kind == RangeKind::Range {
        if let Ok(d) = s.parse::<f64>() {
            if d.is_finite() {
                return Ok(Bound::Dec(d));
            }
        }
    }
    Err(format!("cannot parse `{}` as a bound", s))
}

fn bound_num(b: Bound) -> Option<Number> {
    match b {
        Bound::Int(i) => Some(Number::Int(i)),
        Bound::Dec(d) => Some(Number::Dec(d)),
        _ => None,
    }
}

/// Substitute `min`/`max` with the given bounds and canonicalize.
///
/// Canonical form keeps intervals ascending, disjoint, and merges integer
/// intervals that are adjacent (`[1,4] [5,9]` becomes `[1,9]`) so that
/// containment checks agree with pointwise membership.
pub fn expand_intervals(
    raw: &[RangeInterval],
    base_lo: Number,
    base_hi: Number,
) -> Result<Vec<Interval>, String> {
    let conv = |b: Bound| match b {
        Bound::Min => base_lo,
        Bound::Max => base_hi,
        Bound::Int(i) => Number::Int(i),
        Bound::Dec(d) => Number::Dec(d),
    };
    let mut out: Vec<Interval> = Vec::with_capacity(raw.len());
    for iv in raw {
        let (lo, hi) = (conv(iv.lo), conv(iv.hi));
        if !lo.le(hi) {
            return Err(format!("interval {} .. {} is descending", lo, hi));
        }
        out.push(Interval::new(lo, hi));
    }
    for w in out.windows(2) {
        if !w[0].hi.lt(w[1].lo) {
            return Err("intervals must be disjoint and ascending".to_string());
        }
    }
    Ok(canonicalize(out))
}

fn canonicalize(set: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(set.len());
    for iv in set {
        if let Some(last) = out.last_mut() {
            let touches = match (last.hi, iv.lo) {
                (Number::Int(a), Number::Int(b)) => a.saturating_add(1) >= b,
                (a, b) => !a.lt(b),
            };
            if touches {
                if last.hi.lt(iv.hi) {
                    last.hi = iv.hi;
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

pub fn set_contains(set: &[Interval], n: Number) -> bool {
    set.iter().any(|iv| iv.contains(n))
}

/// Intersection of two canonical interval sets.
pub fn intersect_sets(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = if a[i].lo.le(b[j].lo) { b[j].lo } else { a[i].lo };
        let hi = if a[i].hi.le(b[j].hi) { a[i].hi } else { b[j].hi };
        if lo.le(hi) {
            out.push(Interval::new(lo, hi));
        }
        if a[i].hi.le(b[j].hi) {
            i += 1;
        } else {
            j += 1;
        }
    }
    canonicalize(out)
}

/// True when every child interval lies inside a single parent interval.
/// With canonical sets this is exactly pointwise containment.
pub fn subset_of(child: &[Interval], parent: &[Interval]) -> Result<(), Interval> {
    for iv in child {
        let inside = parent
            .iter()
            .any(|p| p.lo.le(iv.lo) && iv.hi.le(p.hi));
        if !inside {
            return Err(*iv);
        }
    }
    Ok(())
}

/// The effective value space of a (possibly derived) type.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSpace {
    pub base: BaseType,
    /// Numeric space; for integer and float bases this always holds at
    /// least the base bounds.
    pub ranges: Vec<Interval>,
    /// Length space for string/binary; `None` means unrestricted.
    pub lengths: Option<Vec<Interval>>,
    /// Conjunctive patterns: a string value must match all of them.
    pub patterns: Vec<String>,
    pub bit_width: Option<u32>,
    pub enums: Vec<String>,
    pub path: Option<String>,
}

impl ValueSpace {
    pub fn of_base(base: BaseType) -> ValueSpace {
        let ranges = base
            .numeric_bounds()
            .map(|(lo, hi)| vec![Interval::new(lo, hi)])
            .unwrap_or_default();
        ValueSpace {
            base,
            ranges,
            lengths: None,
            patterns: Vec::new(),
            bit_width: None,
            enums: Vec::new(),
            path: None,
        }
    }

    fn length_space(&self) -> Vec<Interval> {
        self.lengths.clone().unwrap_or_else(full_length_space)
    }
}

fn full_length_space() -> Vec<Interval> {
    vec![Interval::new(Number::Int(0), Number::Int(u64::MAX as i128))]
}

/// The default value a typedef chain supplies, with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDefault {
    pub value: String,
    pub supplied_by: String,
}

/// Outcome of following a typedef chain down to a base type.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedType {
    pub base: BaseType,
    /// Typedef names traversed from the use site towards the base type.
    pub chain: Vec<String>,
    pub space: ValueSpace,
    pub default: Option<EffectiveDefault>,
}

pub type ScopeRef = usize;

pub enum TypedefLookup<'a> {
    /// The typedef plus the scope its own `type` statement resolves in.
    Found(&'a Typedef, ScopeRef),
    UnknownPrefix,
    NotFound,
}

/// Name resolution provider for typedef references. Implemented by the
/// semantic checker's scope stack; any frozen lookup structure will do.
pub trait TypedefScope {
    fn lookup_typedef(&self, at: ScopeRef, prefix: Option<&str>, name: &str)
        -> TypedefLookup<'_>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeError {
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

/// Follow the typedef chain of `ts` to a base type, accumulating
/// restrictions into an effective value space.
pub fn resolve_type(
    ts: &TypeSpec,
    at: ScopeRef,
    scope: &dyn TypedefScope,
) -> Result<ResolvedType, TypeError> {
    resolve_inner(ts, at, scope, true)
}

/// Like [`resolve_type`] but without the use-site's own restriction and
/// enums: the space the use site is allowed to narrow.
pub fn resolve_parent_space(
    ts: &TypeSpec,
    at: ScopeRef,
    scope: &dyn TypedefScope,
) -> Result<ResolvedType, TypeError> {
    resolve_inner(ts, at, scope, false)
}

struct Level<'a> {
    ts: &'a TypeSpec,
    default: Option<(&'a str, &'a str)>,
}

fn resolve_inner(
    ts: &TypeSpec,
    at: ScopeRef,
    scope: &dyn TypedefScope,
    include_use_site: bool,
) -> Result<ResolvedType, TypeError> {
    let mut levels: Vec<Level> = vec![Level { ts, default: None }];
    let mut chain: Vec<String> = Vec::new();
    let mut visited: HashSet<SourceSpan> = HashSet::new();
    let mut cur = ts;
    let mut cur_scope = at;

    let base = loop {
        let (prefix, name) = cur.name_parts();
        if prefix.is_none() {
            if let Some(b) = BaseType::from_name(name) {
                break b;
            }
        }
        match scope.lookup_typedef(cur_scope, prefix, name) {
            TypedefLookup::Found(td, decl_scope) => {
                if !visited.insert(td.span.clone()) {
                    return Err(TypeError {
                        code: DiagCode::CircularTypedef,
                        message: format!(
                            "typedef chain `{}` revisits `{}`",
                            chain.join(" -> "),
                            td.name
                        ),
                        span: ts.span.clone(),
                    });
                }
                chain.push(td.name.clone());
                levels.push(Level {
                    ts: &td.type_spec,
                    default: td.default.as_deref().map(|d| (d, td.name.as_str())),
                });
                cur = &td.type_spec;
                cur_scope = decl_scope;
            }
            TypedefLookup::UnknownPrefix => {
                return Err(TypeError {
                    code: DiagCode::UnknownPrefix,
                    message: format!("unknown prefix `{}`", prefix.unwrap_or("")),
                    span: cur.span.clone(),
                });
            }
            TypedefLookup::NotFound => {
                return Err(TypeError {
                    code: DiagCode::UnknownType,
                    message: format!("unknown type `{}`", cur.name),
                    span: cur.span.clone(),
                });
            }
        }
    };

    let mut space = ValueSpace::of_base(base);
    for (idx, level) in levels.iter().enumerate().rev() {
        if idx == 0 && !include_use_site {
            continue;
        }
        apply_level(&mut space, level.ts);
    }
    let default = levels
        .iter()
        .find_map(|l| l.default.map(|(v, n)| EffectiveDefault {
            value: v.to_string(),
            supplied_by: n.to_string(),
        }));

    Ok(ResolvedType {
        base,
        chain,
        space,
        default,
    })
}

/// Intersect one level's declared constraints into the space. Kind
/// mismatches and malformed arguments are skipped here; the dedicated
/// check pass diagnoses them.
fn apply_level(space: &mut ValueSpace, ts: &TypeSpec) {
    if !ts.enums.is_empty() && space.enums.is_empty() {
        space.enums = ts.enums.iter().map(|e| e.name.clone()).collect();
    }
    let Some(restriction) = &ts.restriction else { return };
    match restriction {
        Restriction::Range(raw) => {
            if let Some((lo, hi)) = space.base.numeric_bounds() {
                if let Ok(expanded) = expand_intervals(raw, lo, hi) {
                    space.ranges = intersect_sets(&space.ranges, &expanded);
                }
            }
        }
        Restriction::Length(raw) => {
            if matches!(space.base, BaseType::String | BaseType::Binary) {
                let bounds = full_length_space()[0];
                if let Ok(expanded) = expand_intervals(raw, bounds.lo, bounds.hi) {
                    let current = space.length_space();
                    space.lengths = Some(intersect_sets(&current, &expanded));
                }
            }
        }
        Restriction::Pattern(p) => {
            if space.base == BaseType::String {
                space.patterns.push(p.clone());
            }
        }
        Restriction::BitWidth(w) => {
            if space.base == BaseType::Bits {
                space.bit_width = Some(*w);
            }
        }
        Restriction::Path(p) => {
            if space.base == BaseType::Keyref {
                space.path = Some(p.clone());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceViolation {
    pub code: DiagCode,
    pub message: String,
}

impl SpaceViolation {
    fn new(code: DiagCode, message: String) -> Self {
        SpaceViolation { code, message }
    }
}

/// Verify that `child` only narrows `parent`: every value admitted by the
/// restriction must already be admitted by the parent space. `min`/`max`
/// expand to the base type bounds before the containment check.
pub fn check_restriction_subset(
    child: &Restriction,
    parent: &ValueSpace,
) -> Result<(), SpaceViolation> {
    match child {
        Restriction::Range(raw) => {
            let Some((lo, hi)) = parent.base.numeric_bounds() else {
                return Err(SpaceViolation::new(
                    DiagCode::RestrictionKindMismatch,
                    format!("range restriction on non-numeric type {}", parent.base.name()),
                ));
            };
            let expanded = expand_intervals(raw, lo, hi)
                .map_err(|e| SpaceViolation::new(DiagCode::InvalidArgument, e))?;
            subset_of(&expanded, &parent.ranges).map_err(|iv| {
                SpaceViolation::new(
                    DiagCode::RestrictionWidensBase,
                    format!(
                        "interval {} .. {} is outside the parent value space",
                        iv.lo, iv.hi
                    ),
                )
            })
        }
        Restriction::Length(raw) => {
            if !matches!(parent.base, BaseType::String | BaseType::Binary) {
                return Err(SpaceViolation::new(
                    DiagCode::RestrictionKindMismatch,
                    format!("length restriction on type {}", parent.base.name()),
                ));
            }
            let bounds = full_length_space()[0];
            let expanded = expand_intervals(raw, bounds.lo, bounds.hi)
                .map_err(|e| SpaceViolation::new(DiagCode::InvalidArgument, e))?;
            subset_of(&expanded, &parent.length_space()).map_err(|iv| {
                SpaceViolation::new(
                    DiagCode::RestrictionWidensBase,
                    format!(
                        "length interval {} .. {} is outside the parent value space",
                        iv.lo, iv.hi
                    ),
                )
            })
        }
        Restriction::Pattern(_) => {
            if parent.base == BaseType::String {
                // conjunctive with any parent pattern
                Ok(())
            } else {
                Err(SpaceViolation::new(
                    DiagCode::RestrictionKindMismatch,
                    format!("pattern restriction on type {}", parent.base.name()),
                ))
            }
        }
        Restriction::BitWidth(w) => {
            if parent.base != BaseType::Bits {
                return Err(SpaceViolation::new(
                    DiagCode::RestrictionKindMismatch,
                    format!("bit width on type {}", parent.base.name()),
                ));
            }
            match parent.bit_width {
                Some(pw) if *w > pw => Err(SpaceViolation::new(
                    DiagCode::RestrictionWidensBase,
                    format!("bit width {} exceeds parent width {}", w, pw),
                )),
                _ => Ok(()),
            }
        }
        Restriction::Path(_) => {
            if parent.base == BaseType::Keyref {
                Ok(())
            } else {
                Err(SpaceViolation::new(
                    DiagCode::RestrictionKindMismatch,
                    format!("path restriction on type {}", parent.base.name()),
                ))
            }
        }
    }
}

/// Parse `text` per the base type's lexical form and check membership in
/// the effective value space.
pub fn validate_default(text: &str, rt: &ResolvedType) -> Result<(), SpaceViolation> {
    let value = text.trim();
    if rt.base.is_integer() {
        let n: i128 = value.parse().map_err(|_| {
            SpaceViolation::new(
                DiagCode::DefaultSyntaxError,
                format!("`{}` is not a valid {} literal", value, rt.base.name()),
            )
        })?;
        return if set_contains(&rt.space.ranges, Number::Int(n)) {
            Ok(())
        } else {
            Err(SpaceViolation::new(
                DiagCode::DefaultOutOfRange,
                format!("default {} is outside the effective range", n),
            ))
        };
    }
    if rt.base.is_float() {
        let d: f64 = value.parse().map_err(|_| {
            SpaceViolation::new(
                DiagCode::DefaultSyntaxError,
                format!("`{}` is not a valid {} literal", value, rt.base.name()),
            )
        })?;
        return if set_contains(&rt.space.ranges, Number::Dec(d)) {
            Ok(())
        } else {
            Err(SpaceViolation::new(
                DiagCode::DefaultOutOfRange,
                format!("default {} is outside the effective range", d),
            ))
        };
    }
    match rt.base {
        BaseType::Boolean => match value {
            "true" | "false" => Ok(()),
            _ => Err(SpaceViolation::new(
                DiagCode::DefaultSyntaxError,
                format!("`{}` is not a boolean literal", value),
            )),
        },
        BaseType::Enumeration => {
            if rt.space.enums.iter().any(|e| e == value) {
                Ok(())
            } else {
                Err(SpaceViolation::new(
                    DiagCode::DefaultNotAnEnumMember,
                    format!("`{}` does not name a declared enum", value),
                ))
            }
        }
        BaseType::String => {
            if let Some(lengths) = &rt.space.lengths {
                let len = Number::Int(value.chars().count() as i128);
                if !set_contains(lengths, len) {
                    return Err(SpaceViolation::new(
                        DiagCode::DefaultOutOfRange,
                        format!("default length {} violates the length restriction", len),
                    ));
                }
            }
            for pattern in &rt.space.patterns {
                let Ok(re) = regex::Regex::new(&format!("^(?:{})$", pattern)) else {
                    continue; // unparseable patterns are diagnosed at declaration
                };
                if !re.is_match(value) {
                    return Err(SpaceViolation::new(
                        DiagCode::DefaultOutOfRange,
                        format!("default does not match pattern `{}`", pattern),
                    ));
                }
            }
            Ok(())
        }
        BaseType::Empty => Err(SpaceViolation::new(
            DiagCode::DefaultSyntaxError,
            "type empty carries no value, a default cannot apply".to_string(),
        )),
        _ => Ok(()), // bits, binary, keyref: no lexical check applies
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    /// Minimal scope: a list of frames, each mapping names to typedefs and
    /// the frame their own type resolves in.
    struct MapScope {
        frames: Vec<HashMap<String, (Typedef, ScopeRef)>>,
    }

    impl TypedefScope for MapScope {
        fn lookup_typedef(
            &self,
            at: ScopeRef,
            prefix: Option<&str>,
            name: &str,
        ) -> TypedefLookup<'_> {
            if prefix.is_some() {
                return TypedefLookup::UnknownPrefix;
            }
            match self.frames[at].get(name) {
                Some((td, decl)) => TypedefLookup::Found(td, *decl),
                None => TypedefLookup::NotFound,
            }
        }
    }

    fn ts(name: &str, restriction: Option<Restriction>) -> TypeSpec {
        TypeSpec {
            name: name.to_string(),
            enums: Vec::new(),
            restriction,
            span: SourceSpan::point("t.yang", 1, 1),
        }
    }

    fn td(name: &str, ty: TypeSpec, default: Option<&str>, line: u32) -> Typedef {
        Typedef {
            name: name.to_string(),
            type_spec: ty,
            units: None,
            default: default.map(str::to_string),
            status: None,
            description: None,
            reference: None,
            span: SourceSpan::point("t.yang", line, 1),
            ext_uses: Vec::new(),
        }
    }

    fn single_frame(defs: Vec<Typedef>) -> MapScope {
        let mut m = HashMap::new();
        for t in defs {
            m.insert(t.name.clone(), (t, 0));
        }
        MapScope { frames: vec![m] }
    }

    fn range(text: &str) -> Restriction {
        Restriction::Range(parse_range_text(text, RangeKind::Range).unwrap())
    }

    #[test]
    fn base_type_resolves_to_itself() {
        let scope = single_frame(vec![]);
        let rt = resolve_type(&ts("int8", None), 0, &scope).unwrap();
        assert_eq!(rt.base, BaseType::Int8);
        assert!(rt.chain.is_empty());
        assert_eq!(rt.space.ranges, vec![Interval::new(Number::Int(-128), Number::Int(127))]);
    }

    #[test]
    fn counter32_style_typedef_chain() {
        let scope = single_frame(vec![td("counter32", ts("uint32", None), None, 2)]);
        let rt = resolve_type(&ts("counter32", None), 0, &scope).unwrap();
        assert_eq!(rt.base, BaseType::Uint32);
        assert_eq!(rt.chain, vec!["counter32"]);
    }

    #[test]
    fn circular_typedef_detected() {
        // oracle: the reference graph a -> b -> a has a cycle
        let mut edges = HashMap::new();
        edges.insert("a", "b");
        edges.insert("b", "a");
        let mut seen = vec!["a"];
        let mut cur = "a";
        let cycle = loop {
            cur = edges[cur];
            if seen.contains(&cur) {
                break true;
            }
            seen.push(cur);
        };
        assert!(cycle);

        let scope = single_frame(vec![
            td("a", ts("b", None), None, 2),
            td("b", ts("a", None), None, 3),
        ]);
        let err = resolve_type(&ts("a", None), 0, &scope).unwrap_err();
        assert_eq!(err.code, DiagCode::CircularTypedef);
    }

    #[test]
    fn unknown_type_and_prefix() {
        let scope = single_frame(vec![]);
        let err = resolve_type(&ts("nosuch", None), 0, &scope).unwrap_err();
        assert_eq!(err.code, DiagCode::UnknownType);
        let err = resolve_type(&ts("p:x", None), 0, &scope).unwrap_err();
        assert_eq!(err.code, DiagCode::UnknownPrefix);
    }

    #[test]
    fn range_one_to_max_over_int32() {
        let scope = single_frame(vec![]);
        let rt = resolve_type(&ts("int32", Some(range("1 .. max"))), 0, &scope).unwrap();
        assert_eq!(
            rt.space.ranges,
            vec![Interval::new(Number::Int(1), Number::Int(2_147_483_647))]
        );
        let parent = ValueSpace::of_base(BaseType::Int32);
        assert!(check_restriction_subset(&range("1 .. max"), &parent).is_ok());
    }

    #[test]
    fn widened_range_rejected() {
        // oracle: 300 is a member of [0,300] but not of uint8's [0,255]
        let parent = ValueSpace::of_base(BaseType::Uint8);
        assert!(!set_contains(&parent.ranges, Number::Int(300)));
        let err = check_restriction_subset(&range("0 .. 300"), &parent).unwrap_err();
        assert_eq!(err.code, DiagCode::RestrictionWidensBase);
    }

    #[test]
    fn full_base_range_is_a_subset() {
        let parent = ValueSpace::of_base(BaseType::Uint8);
        assert!(check_restriction_subset(&range("0 .. 255"), &parent).is_ok());
        assert!(check_restriction_subset(&range("min .. max"), &parent).is_ok());
    }

    #[test]
    fn min_max_expand_to_exact_base_bounds() {
        for base in [BaseType::Int8, BaseType::Int64, BaseType::Uint16, BaseType::Uint64] {
            let (lo, hi) = base.numeric_bounds().unwrap();
            let raw = parse_range_text("min .. max", RangeKind::Range).unwrap();
            let expanded = expand_intervals(&raw, lo, hi).unwrap();
            assert_eq!(expanded, vec![Interval::new(lo, hi)]);
        }
    }

    #[test]
    fn range_kind_mismatch() {
        let parent = ValueSpace::of_base(BaseType::String);
        let err = check_restriction_subset(&range("1 .. 2"), &parent).unwrap_err();
        assert_eq!(err.code, DiagCode::RestrictionKindMismatch);
        let parent = ValueSpace::of_base(BaseType::Int8);
        let err =
            check_restriction_subset(&Restriction::Pattern("a*".into()), &parent).unwrap_err();
        assert_eq!(err.code, DiagCode::RestrictionKindMismatch);
    }

    #[test]
    fn defaults_inside_and_outside_the_range() {
        let scope = single_frame(vec![]);
        let rt = resolve_type(&ts("int32", Some(range("1 .. max"))), 0, &scope).unwrap();
        assert!(validate_default("10", &rt).is_ok());
        let err = validate_default("0", &rt).unwrap_err();
        assert_eq!(err.code, DiagCode::DefaultOutOfRange);
        let err = validate_default("ten", &rt).unwrap_err();
        assert_eq!(err.code, DiagCode::DefaultSyntaxError);
    }

    #[test]
    fn boolean_and_enum_defaults() {
        let scope = single_frame(vec![]);
        let rt = resolve_type(&ts("boolean", None), 0, &scope).unwrap();
        assert!(validate_default("true", &rt).is_ok());
        assert!(validate_default("yes", &rt).is_err());

        let mut rt = resolve_type(&ts("enumeration", None), 0, &scope).unwrap();
        rt.space.enums = vec!["up".into(), "down".into()];
        assert!(validate_default("up", &rt).is_ok());
        let err = validate_default("sideways", &rt).unwrap_err();
        assert_eq!(err.code, DiagCode::DefaultNotAnEnumMember);
    }

    #[test]
    fn string_default_checks_length_and_pattern() {
        let scope = single_frame(vec![]);
        let lens = Restriction::Length(parse_range_text("1 .. 3", RangeKind::Length).unwrap());
        let rt = resolve_type(&ts("string", Some(lens)), 0, &scope).unwrap();
        assert!(validate_default("ab", &rt).is_ok());
        assert!(validate_default("abcd", &rt).is_err());

        let pat = Restriction::Pattern("[a-z]+".into());
        let rt = resolve_type(&ts("string", Some(pat)), 0, &scope).unwrap();
        assert!(validate_default("abc", &rt).is_ok());
        assert!(validate_default("ABC", &rt).is_err());
    }

    #[test]
    fn chain_default_comes_from_nearest_typedef() {
        let inner = td("base-t", ts("int32", None), Some("1"), 2);
        let outer = td("derived-t", ts("base-t", None), Some("5"), 3);
        let scope = single_frame(vec![inner, outer]);
        let rt = resolve_type(&ts("derived-t", None), 0, &scope).unwrap();
        let d = rt.default.unwrap();
        assert_eq!(d.value, "5");
        assert_eq!(d.supplied_by, "derived-t");
        assert_eq!(rt.chain, vec!["derived-t", "base-t"]);
    }

    #[test]
    fn chains_narrow_monotonically() {
        let t1 = td("t1", ts("int32", Some(range("0 .. 100"))), None, 2);
        let t2 = td("t2", ts("t1", Some(range("10 .. 50"))), None, 3);
        let scope = single_frame(vec![t1, t2]);
        let outer = resolve_type(&ts("t2", None), 0, &scope).unwrap();
        let inner = resolve_type(&ts("t1", None), 0, &scope).unwrap();
        // every sampled member of the outer space is in the inner space
        for v in [-1, 0, 9, 10, 30, 50, 51, 100, 101] {
            let n = Number::Int(v);
            if set_contains(&outer.space.ranges, n) {
                assert!(set_contains(&inner.space.ranges, n));
            }
        }
        assert_eq!(outer.space.ranges, vec![Interval::new(Number::Int(10), Number::Int(50))]);
    }

    #[test]
    fn adjacent_integer_intervals_merge() {
        let raw = parse_range_text("1 .. 4 | 5 .. 9", RangeKind::Range).unwrap();
        let e = expand_intervals(&raw, Number::Int(-100), Number::Int(100)).unwrap();
        assert_eq!(e, vec![Interval::new(Number::Int(1), Number::Int(9))]);
        // consequence: a range spanning the seam is still a subset
        let parent = ValueSpace {
            ranges: e,
            ..ValueSpace::of_base(BaseType::Int32)
        };
        assert!(check_restriction_subset(&range("2 .. 8"), &parent).is_ok());
    }

    #[test]
    fn malformed_interval_sets_rejected() {
        assert!(parse_range_text("5 .. 1", RangeKind::Range).is_err());
        assert!(parse_range_text("1 .. 3 | 2 .. 9", RangeKind::Range).is_err());
        assert!(parse_range_text("max .. 1", RangeKind::Range).is_err());
        assert!(parse_range_text("1 | min", RangeKind::Range).is_err());
        assert!(parse_range_text("-1 .. 2", RangeKind::Length).is_err());
        assert!(parse_range_text("1.5", RangeKind::Length).is_err());
        assert!(parse_range_text("", RangeKind::Range).is_err());
    }

    #[test]
    fn float_ranges_compare_exactly() {
        let scope = single_frame(vec![]);
        let rt = resolve_type(&ts("float32", Some(range("0.5 .. 2.5"))), 0, &scope).unwrap();
        assert!(validate_default("0.5", &rt).is_ok());
        assert!(validate_default("2.5", &rt).is_ok());
        assert!(validate_default("2.5000001", &rt).is_err());
    }

    #[test]
    fn resolution_is_deterministic() {
        let scope = single_frame(vec![td("c", ts("uint32", None), None, 2)]);
        let a = resolve_type(&ts("c", None), 0, &scope).unwrap();
        let b = resolve_type(&ts("c", None), 0, &scope).unwrap();
        assert_eq!(a, b);
    }
}

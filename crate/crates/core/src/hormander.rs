//! Iterated Lie brackets of a generator family and the pointwise rank test
//! for the bracket-generating condition.
//!
//! Only left-nested brackets `[X_i1, [X_i2, [..., X_id]]]` are generated;
//! by the Jacobi identity they span the same space as all bracket shapes.
//! A rank deficit at a sampled point is definitive for that point, while a
//! full rank everywhere only certifies the sampled set.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::expr::{Env, EvalError, Expr, Point, Simplifier, Value};
use crate::linalg::{greedy_rank, Arithmetic};
use crate::vfield::{lie_bracket_with, FieldError, VectorField};

pub const DEFAULT_MAX_DEPTH: usize = 4;
pub const DEFAULT_EPS_RANK: f64 = 1e-9;
pub const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BracketEntry {
    pub field: VectorField,
    pub depth: usize,
    /// `(generator index, entry index)` this bracket was formed from;
    /// `None` at depth 0.
    pub parents: Option<(usize, usize)>,
}

impl BracketEntry {
    pub fn trace(&self) -> &str {
        self.field.label()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketBasis {
    generators: Vec<VectorField>,
    entries: Vec<BracketEntry>,
    max_depth: usize,
}

impl BracketBasis {
    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    /// Generators first, then brackets ordered by depth.
    pub fn entries(&self) -> &[BracketEntry] {
        &self.entries
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, VectorField::dim)
    }

    pub fn at_depth(&self, d: usize) -> impl Iterator<Item = &BracketEntry> {
        self.entries.iter().filter(move |e| e.depth == d)
    }
}

pub fn generate_brackets(generators: &[VectorField], max_depth: usize) -> Result<BracketBasis, FieldError> {
    generate_brackets_with(generators, max_depth, &Simplifier::default())
}

/// Generate all left-nested brackets up to `max_depth`. Brackets that are
/// structurally zero, or an exact rational multiple of an earlier entry, are
/// dropped and not extended further.
pub fn generate_brackets_with(
    generators: &[VectorField],
    max_depth: usize,
    simp: &Simplifier,
) -> Result<BracketBasis, FieldError> {
    if let Some(first) = generators.first() {
        if let Some(bad) = generators.iter().find(|g| g.dim() != first.dim()) {
            return Err(FieldError::DimensionMismatch {
                left: first.dim(),
                right: bad.dim(),
            });
        }
    }
    let mut entries: Vec<BracketEntry> = generators
        .iter()
        .map(|g| BracketEntry {
            field: g.simplified(simp),
            depth: 0,
            parents: None,
        })
        .collect();
    let mut frontier: Vec<usize> = (0..entries.len()).filter(|&i| !entries[i].field.is_zero()).collect();

    for depth in 1..=max_depth {
        if frontier.is_empty() {
            break;
        }
        let pairs: Vec<(usize, usize)> = (0..generators.len())
            .flat_map(|g| frontier.iter().map(move |&e| (g, e)))
            .collect();
        let candidates = pairs
            .par_iter()
            .map(|&(g, e)| lie_bracket_with(&entries[g].field, &entries[e].field, simp).map(|f| (g, e, f)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut next = Vec::new();
        for (g, e, field) in candidates {
            if field.is_zero() || entries.iter().any(|old| rational_multiple(&field, &old.field).is_some()) {
                continue;
            }
            next.push(entries.len());
            entries.push(BracketEntry {
                field,
                depth,
                parents: Some((g, e)),
            });
        }
        frontier = next;
    }
    Ok(BracketBasis {
        generators: generators.to_vec(),
        entries,
        max_depth,
    })
}

/// If `a = c * b` for an exact rational `c`, return `c`. Both fields must be
/// simplified.
pub fn rational_multiple(a: &VectorField, b: &VectorField) -> Option<BigRational> {
    if a.dim() != b.dim() {
        return None;
    }
    let l = (0..a.dim()).find(|&l| !a.coeffs()[l].is_zero() || !b.coeffs()[l].is_zero())?;
    let (ca, cb) = (&a.coeffs()[l], &b.coeffs()[l]);
    if ca.is_zero() || cb.is_zero() {
        return None;
    }
    // match the first term of `a` with the term of `b` sharing its symbolic part
    let (qa, ra) = crate::expr::split_coeff(summands(ca)[0].clone());
    let qb = summands(cb)
        .into_iter()
        .map(|t| crate::expr::split_coeff(t.clone()))
        .find(|(_, rb)| *rb == ra)?
        .0;
    if qb.is_zero() {
        return None;
    }
    let c = qa / qb;
    let ce = Expr::Const(c.clone());
    let ok = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| Expr::sub(x.clone(), Expr::mul(vec![ce.clone(), y.clone()])).simplify().is_zero());
    ok.then_some(c)
}

fn summands(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Add(terms) => terms.iter().collect(),
        e => vec![e],
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("coefficient undefined at point: {label}: {source}")]
pub struct UndefinedCoefficient {
    pub label: String,
    #[source]
    pub source: EvalError,
}

/// Rank result at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRank {
    pub point: Point,
    pub rank: usize,
    /// Entry indices of the greedy maximal independent subset.
    pub witness: Vec<usize>,
    pub arithmetic: Arithmetic,
    pub min_pivot: Option<f64>,
    /// Depth of the entry at which rank `n` was first reached.
    pub full_rank_depth: Option<usize>,
    /// Entries whose coefficients could not be evaluated here, with the
    /// evaluation failure; they are left out of the rank computation.
    pub undefined: Vec<(usize, EvalError)>,
}

fn rank_rows(basis: &BracketBasis, p: &Point, eps: f64, lenient: bool) -> Result<PointRank, UndefinedCoefficient> {
    let env = Env::from_x(p);
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut row_entry = Vec::new();
    let mut undefined = Vec::new();
    for (i, entry) in basis.entries.iter().enumerate() {
        match entry.field.eval(&env) {
            Ok(row) => {
                rows.push(row);
                row_entry.push(i);
            }
            Err(source) if lenient => undefined.push((i, source)),
            Err(source) => {
                return Err(UndefinedCoefficient {
                    label: entry.field.label().to_string(),
                    source,
                })
            }
        }
    }
    let res = greedy_rank(&rows, eps);
    let witness: Vec<usize> = res.pivots.iter().map(|&r| row_entry[r]).collect();
    let n = basis.dim();
    let full_rank_depth = if n > 0 && witness.len() >= n {
        Some(basis.entries[witness[n - 1]].depth)
    } else if n == 0 {
        Some(0)
    } else {
        None
    };
    Ok(PointRank {
        point: p.clone(),
        rank: res.rank,
        witness,
        arithmetic: res.arithmetic,
        min_pivot: res.min_pivot,
        full_rank_depth,
        undefined,
    })
}

/// Rank of the evaluated basis at `p`. Fails if any coefficient is undefined.
pub fn rank_at(basis: &BracketBasis, p: &Point, eps: f64) -> Result<PointRank, UndefinedCoefficient> {
    rank_rows(basis, p, eps, false)
}

/// Axis-aligned sample grid plus optional extra points.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub bounds: Vec<(BigRational, BigRational)>,
    pub per_axis: usize,
    pub extra: Vec<Point>,
}

impl SamplingPlan {
    /// `[-1, 1]^n` with 3 points per axis.
    pub fn default_for(n: usize) -> Self {
        let one = BigRational::one();
        SamplingPlan {
            bounds: vec![(-one.clone(), one); n],
            per_axis: 3,
            extra: Vec::new(),
        }
    }

    pub fn grid(n: usize, per_axis: usize) -> Self {
        SamplingPlan {
            per_axis,
            ..Self::default_for(n)
        }
    }

    pub fn with_extra(mut self, extra: Vec<Point>) -> Self {
        self.extra = extra;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Points per axis after applying the total cap.
    pub fn effective_per_axis(&self) -> usize {
        let n = self.bounds.len() as u32;
        let mut m = self.per_axis.max(1);
        while m > 1 && (m as f64).powi(n as i32) > MAX_GRID_POINTS as f64 {
            m -= 1;
        }
        m
    }

    /// Grid points in lexicographic order (first axis slowest), then extras.
    pub fn points(&self) -> Vec<Point> {
        let m = self.effective_per_axis();
        let axes: Vec<Vec<BigRational>> = self
            .bounds
            .iter()
            .map(|(lo, hi)| {
                if m == 1 {
                    vec![(lo + hi) / BigRational::from_integer(BigInt::from(2))]
                } else {
                    let steps = BigRational::from_integer(BigInt::from(m - 1));
                    (0..m)
                        .map(|i| lo + (hi - lo) * BigRational::from_integer(BigInt::from(i)) / &steps)
                        .collect()
                }
            })
            .collect();
        let mut out: Vec<Vec<BigRational>> = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c.clone());
                        p
                    })
                })
                .collect();
        }
        let mut points: Vec<Point> = if axes.is_empty() {
            Vec::new()
        } else {
            out.into_iter().map(Point::exact).collect()
        };
        points.extend(self.extra.iter().cloned());
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub n: usize,
    pub max_depth: usize,
    pub points: Vec<PointRank>,
    pub spanning_everywhere: bool,
    /// Indices into `points` with rank below `n`.
    pub failing_points: Vec<usize>,
    /// Indices into `points` where some entry could not be evaluated.
    pub undefined_points: Vec<usize>,
}

impl RankReport {
    pub fn verdict_text(&self) -> String {
        if self.spanning_everywhere {
            "spanning on sampled set".to_string()
        } else {
            format!("not spanning up to depth {} on sampled set", self.max_depth)
        }
    }

    pub fn min_rank(&self) -> usize {
        self.points.iter().map(|p| p.rank).min().unwrap_or(0)
    }

    /// Deepest bracket level needed at any sampled point.
    pub fn depth_used(&self) -> Option<usize> {
        if !self.spanning_everywhere {
            return None;
        }
        self.points.iter().filter_map(|p| p.full_rank_depth).max()
    }
}

/// Rank test over every point of `plan`. Entries undefined at a point are
/// excluded there and the point is listed in `undefined_points`.
pub fn check_spanning(basis: &BracketBasis, plan: &SamplingPlan, eps: f64) -> RankReport {
    check_points(basis, &plan.points(), eps)
}

pub fn check_points(basis: &BracketBasis, points: &[Point], eps: f64) -> RankReport {
    let n = basis.dim();
    let ranks: Vec<PointRank> = points
        .par_iter()
        .map(|p| rank_rows(basis, p, eps, true).expect("lenient evaluation does not fail"))
        .collect();
    let failing_points: Vec<usize> = ranks.iter().enumerate().filter(|(_, r)| r.rank < n).map(|(i, _)| i).collect();
    let undefined_points = ranks
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.undefined.is_empty())
        .map(|(i, _)| i)
        .collect();
    RankReport {
        n,
        max_depth: basis.max_depth,
        spanning_everywhere: failing_points.is_empty() && !ranks.is_empty(),
        failing_points,
        undefined_points,
        points: ranks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grushin() -> Vec<VectorField> {
        vec![
            VectorField::parse("X1", &["1", "0"]).unwrap(),
            VectorField::parse("X2", &["0", "x1"]).unwrap(),
        ]
    }

    #[test]
    fn grushin_first_bracket() {
        let basis = generate_brackets(&grushin(), 1).unwrap();
        let deep: Vec<_> = basis.at_depth(1).collect();
        assert_eq!(deep.len(), 1);
        assert_eq!(deep[0].trace(), "[X1,X2]");
        assert_eq!(deep[0].field.coeffs(), &[Expr::zero(), Expr::one()]);
    }

    #[test]
    fn constant_fields_have_no_brackets() {
        let gens = vec![
            VectorField::parse("X1", &["1", "0"]).unwrap(),
            VectorField::parse("X2", &["0", "1"]).unwrap(),
        ];
        let basis = generate_brackets(&gens, 4).unwrap();
        assert_eq!(basis.entries().len(), 2);
        let single = generate_brackets(&gens[..1], 3).unwrap();
        assert_eq!(single.entries().len(), 1);
    }

    #[test]
    fn rational_multiples_are_deduplicated() {
        let a = VectorField::parse("A", &["x1 + 1", "2*x2"]).unwrap().simplified(&Simplifier::default());
        let b = VectorField::parse("B", &["-3/2*x1 - 3/2", "-3*x2"]).unwrap().simplified(&Simplifier::default());
        assert_eq!(rational_multiple(&b, &a), Some(BigRational::new((-3).into(), 2.into())));
        let c = VectorField::parse("C", &["x1 + 1", "x2"]).unwrap().simplified(&Simplifier::default());
        assert_eq!(rational_multiple(&c, &a), None);
    }

    #[test]
    fn grushin_rank_at_origin() {
        let origin = Point::exact(vec![BigRational::zero(), BigRational::zero()]);
        let depth1 = generate_brackets(&grushin(), 1).unwrap();
        let r = rank_at(&depth1, &origin, DEFAULT_EPS_RANK).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.witness, vec![0, 2]);
        assert_eq!(r.full_rank_depth, Some(1));
        let depth0 = generate_brackets(&grushin(), 0).unwrap();
        assert_eq!(rank_at(&depth0, &origin, DEFAULT_EPS_RANK).unwrap().rank, 1);
        let zero = generate_brackets(&[VectorField::zero("Z", 2)], 2).unwrap();
        assert_eq!(rank_at(&zero, &origin, DEFAULT_EPS_RANK).unwrap().rank, 0);
    }

    #[test]
    fn undefined_coefficients() {
        let gens = vec![VectorField::parse("X", &["1/x1"]).unwrap()];
        let basis = generate_brackets(&gens, 0).unwrap();
        let origin = Point::exact(vec![BigRational::zero()]);
        assert!(rank_at(&basis, &origin, DEFAULT_EPS_RANK).is_err());
        let report = check_points(&basis, &[origin], DEFAULT_EPS_RANK);
        assert_eq!(report.undefined_points, vec![0]);
        assert!(!report.spanning_everywhere);
    }

    #[test]
    fn spanning_over_grids() {
        let plan = SamplingPlan::grid(2, 5);
        let report = check_spanning(&generate_brackets(&grushin(), 1).unwrap(), &plan, DEFAULT_EPS_RANK);
        assert_eq!(report.points.len(), 25);
        assert!(report.spanning_everywhere);
        assert_eq!(report.verdict_text(), "spanning on sampled set");

        let one = generate_brackets(&[VectorField::parse("X", &["1", "0"]).unwrap()], 4).unwrap();
        let report = check_spanning(&one, &SamplingPlan::default_for(2), DEFAULT_EPS_RANK);
        assert!(!report.spanning_everywhere);
        assert!(report.points.iter().all(|p| p.rank == 1));
        assert_eq!(report.verdict_text(), "not spanning up to depth 4 on sampled set");

        let axes = vec![
            VectorField::parse("X1", &["1", "0"]).unwrap(),
            VectorField::parse("X2", &["0", "1"]).unwrap(),
        ];
        let report = check_spanning(&generate_brackets(&axes, 0).unwrap(), &plan, DEFAULT_EPS_RANK);
        assert!(report.spanning_everywhere);
        assert_eq!(report.depth_used(), Some(0));
    }

    #[test]
    fn grid_cap_and_layout() {
        let plan = SamplingPlan::grid(3, 50);
        assert_eq!(plan.effective_per_axis(), 21);
        assert!(plan.points().len() <= MAX_GRID_POINTS);
        let pts = SamplingPlan::default_for(2).points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[1], Point::exact(vec![-BigRational::one(), BigRational::zero()]));
        let mid = SamplingPlan::grid(1, 1).points();
        assert_eq!(mid, vec![Point::exact(vec![BigRational::zero()])]);
    }
}

//! Closed-form secrecy degrees of freedom for the two-user MIMO wiretap and
//! broadcast channels, in exact rational arithmetic.
//!
//! Floating point never enters this module, so boundary and tightness checks
//! are plain equalities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A point `(dA, dB)`.
pub type Point = (Rational, Rational);

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn int(n: u32) -> Rational {
    Rational::from_integer(i64::from(n))
}

/// Transmit antennas `m` and receive antennas `na`, `nb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub m: u32,
    pub na: u32,
    pub nb: u32,
}

impl AntennaConfig {
    pub fn new(m: u32, na: u32, nb: u32) -> Result<Self> {
        let cfg = Self { m, na, nb };
        if m == 0 || na == 0 || nb == 0 {
            return Err(Error::InvalidAntennas(cfg));
        }
        Ok(cfg)
    }

    /// `min(m, nA + nB)`: antennas beyond `nA + nB` add nothing.
    pub fn effective_tx(&self) -> u32 {
        self.m.min(self.na + self.nb)
    }

    /// The same configuration with `m` replaced by [`Self::effective_tx`].
    pub fn capped(&self) -> Self {
        Self {
            m: self.effective_tx(),
            ..*self
        }
    }

    /// Exchanges the roles of the two receivers.
    pub fn swapped(&self) -> Self {
        Self {
            m: self.m,
            na: self.nb,
            nb: self.na,
        }
    }

    /// `m > max(nA, nB)`, the regime where delayed CSIT helps.
    pub fn exceeds_receivers(&self) -> bool {
        self.m > self.na.max(self.nb)
    }

    /// Rank of the stacked state matrix under full-rank fading.
    pub fn state_rank(&self) -> usize {
        self.effective_tx() as usize
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, nA={}, nB={})", self.m, self.na, self.nb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsitMode {
    Perfect,
    Delayed,
    DelayedPartial,
    NoCsit,
}

impl CsitMode {
    pub const ALL: [CsitMode; 4] = [
        CsitMode::Perfect,
        CsitMode::Delayed,
        CsitMode::DelayedPartial,
        CsitMode::NoCsit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CsitMode::Perfect => "perfect",
            CsitMode::Delayed => "delayed",
            CsitMode::DelayedPartial => "partial",
            CsitMode::NoCsit => "no",
        }
    }
}

impl fmt::Display for CsitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CsitMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "perfect" => Ok(CsitMode::Perfect),
            "delayed" => Ok(CsitMode::Delayed),
            "partial" | "delayed-partial" => Ok(CsitMode::DelayedPartial),
            "no" | "none" | "no-csit" => Ok(CsitMode::NoCsit),
            other => Err(format!(
                "unknown CSIT mode '{other}' (expected perfect, delayed, partial or no)"
            )),
        }
    }
}

/// Wiretap SDoF with delayed CSIT on both channels, `d_s(nA, nB, m)`.
pub fn sdof_wiretap_delayed(cfg: AntennaConfig) -> Rational {
    let AntennaConfig { m, na, nb } = cfg;
    let (m, na, nb) = (i64::from(m), i64::from(na), i64::from(nb));
    if m <= nb {
        Rational::zero()
    } else if m <= na {
        Rational::from_integer(m - nb)
    } else if m <= na + nb {
        rat(na * m * (m - nb), na * nb + m * (m - nb))
    } else {
        rat(na * (na + nb), na + 2 * nb)
    }
}

/// Achievable wiretap SDoF with delayed CSIT on the legitimate channel only.
///
/// Only defined for `m > max(nA, nB)`.
pub fn sdof_wiretap_partial(cfg: AntennaConfig) -> Result<Rational> {
    if !cfg.exceeds_receivers() {
        return Err(Error::OutOfTheoremRange {
            what: "the partial-CSIT SDoF",
            cfg,
        });
    }
    let (m, na, nb) = (i64::from(cfg.m), i64::from(cfg.na), i64::from(cfg.nb));
    Ok(if m <= na + nb {
        rat(na * (m - nb), m)
    } else {
        rat(na * na, na + nb)
    })
}

/// Wiretap SDoF for any CSIT mode.
pub fn sdof_wiretap(cfg: AntennaConfig, mode: CsitMode) -> Result<Rational> {
    let secrecy_gap = (i64::from(cfg.m) - i64::from(cfg.nb)).max(0);
    match mode {
        CsitMode::Perfect => Ok(Rational::from_integer(secrecy_gap.min(i64::from(cfg.na)))),
        CsitMode::Delayed => Ok(sdof_wiretap_delayed(cfg)),
        CsitMode::DelayedPartial => sdof_wiretap_partial(cfg),
        // (nA - nB)^+ above max(nA, nB); below it every mode gives (m - nB)^+.
        CsitMode::NoCsit => {
            let receive_gap = (i64::from(cfg.na) - i64::from(cfg.nb)).max(0);
            Ok(Rational::from_integer(receive_gap.min(secrecy_gap)))
        }
    }
}

/// `a * dA + b * dB <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Self { a, b, c }
    }

    fn value(&self, p: &Point) -> Rational {
        self.a * p.0 + self.b * p.1
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.value(p) <= self.c
    }

    pub fn is_tight(&self, p: &Point) -> bool {
        self.value(p) == self.c
    }

    fn swapped(&self) -> Self {
        Self::new(self.b, self.a, self.c)
    }
}

/// Convex region in the nonnegative `(dA, dB)` quadrant.
///
/// Vertices exclude the origin (always feasible) unless the region is the
/// origin alone, and run counterclockwise from the vertex on the `dA` axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdofRegion {
    halfplanes: Vec<HalfPlane>,
    vertices: Vec<Point>,
}

impl SdofRegion {
    pub fn from_halfplanes(halfplanes: Vec<HalfPlane>) -> Self {
        let vertices = enumerate_vertices(&halfplanes);
        Self { halfplanes, vertices }
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.0 >= Rational::zero() && p.1 >= Rational::zero() && self.halfplanes.iter().all(|h| h.contains(p))
    }

    /// Mirror image under `dA <-> dB`.
    pub fn swap_axes(&self) -> Self {
        Self::from_halfplanes(self.halfplanes.iter().map(HalfPlane::swapped).collect())
    }

    /// Number of constraints (half-planes and axes) active at `p`.
    pub fn active_constraints(&self, p: &Point) -> usize {
        let axes = usize::from(p.0.is_zero()) + usize::from(p.1.is_zero());
        axes + self.halfplanes.iter().filter(|h| h.is_tight(p)).count()
    }
}

fn enumerate_vertices(halfplanes: &[HalfPlane]) -> Vec<Point> {
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut lines = halfplanes.to_vec();
    lines.push(HalfPlane::new(-one, zero, zero));
    lines.push(HalfPlane::new(zero, -one, zero));

    let feasible = |p: &Point| lines.iter().all(|h| h.contains(p));
    let mut points: Vec<Point> = Vec::new();
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            let det = l1.a * l2.b - l2.a * l1.b;
            if det.is_zero() {
                continue;
            }
            let p = ((l1.c * l2.b - l2.c * l1.b) / det, (l1.a * l2.c - l2.a * l1.c) / det);
            if feasible(&p) && !points.contains(&p) {
                points.push(p);
            }
        }
    }
    if points.len() > 1 {
        points.retain(|p| !(p.0.is_zero() && p.1.is_zero()));
    }
    // Counterclockwise about the origin, ties lexicographic.
    points.sort_by(|p, q| {
        let cross = p.0 * q.1 - p.1 * q.0;
        match cross.cmp(&zero) {
            Ordering::Greater => Ordering::Less,
            Ordering::Less => Ordering::Greater,
            Ordering::Equal => p.cmp(q),
        }
    });
    points
}

fn axis_segment_a(len: Rational) -> SdofRegion {
    let (zero, one) = (Rational::zero(), Rational::one());
    SdofRegion::from_halfplanes(vec![HalfPlane::new(one, zero, len), HalfPlane::new(zero, one, zero)])
}

/// Optimal SDoF region of the two-user BCC with delayed CSIT.
pub fn bcc_region_delayed(cfg: AntennaConfig) -> SdofRegion {
    let one = Rational::one();
    let (m, na, nb) = (cfg.m, cfg.na, cfg.nb);
    if cfg.exceeds_receivers() {
        let mt = int(cfg.effective_tx());
        let da = sdof_wiretap_delayed(cfg);
        let db = sdof_wiretap_delayed(cfg.swapped());
        SdofRegion::from_halfplanes(vec![
            HalfPlane::new(one / da, one / mt, one),
            HalfPlane::new(one / mt, one / db, one),
        ])
    } else if nb < m && m <= na {
        axis_segment_a(int(m - nb))
    } else if na < m && m <= nb {
        axis_segment_a(int(m - na)).swap_axes()
    } else {
        axis_segment_a(Rational::zero())
    }
}

/// Sum-SDoF corner of [`bcc_region_delayed`].
pub fn bcc_sum_point(cfg: AntennaConfig) -> Result<Point> {
    if !cfg.exceeds_receivers() {
        return Err(Error::OutOfTheoremRange {
            what: "the BCC sum-SDoF point",
            cfg,
        });
    }
    let (m, na, nb) = (i64::from(cfg.m), i64::from(cfg.na), i64::from(cfg.nb));
    Ok(if m <= na + nb {
        (rat(na * (m - nb), m), rat(nb * (m - na), m))
    } else {
        (rat(na * na, na + nb), rat(nb * nb, na + nb))
    })
}

/// DoF region (no secrecy) of the two-user MIMO broadcast channel with
/// delayed CSIT.
pub fn bc_dof_region_delayed(cfg: AntennaConfig) -> SdofRegion {
    let one = Rational::one();
    let mt = int(cfg.effective_tx());
    let a_max = int(cfg.m.min(cfg.na));
    let b_max = int(cfg.m.min(cfg.nb));
    SdofRegion::from_halfplanes(vec![
        HalfPlane::new(one / a_max, one / mt, one),
        HalfPlane::new(one / mt, one / b_max, one),
    ])
}

/// SDoF region with perfect CSIT: an axis-aligned rectangle.
pub fn bcc_region_perfect(cfg: AntennaConfig) -> Result<SdofRegion> {
    if !cfg.exceeds_receivers() {
        return Err(Error::OutOfTheoremRange {
            what: "the perfect-CSIT SDoF region",
            cfg,
        });
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let a = int(cfg.na.min(cfg.m - cfg.nb));
    let b = int((cfg.m - cfg.na).min(cfg.nb));
    Ok(SdofRegion::from_halfplanes(vec![
        HalfPlane::new(one, zero, a),
        HalfPlane::new(zero, one, b),
    ]))
}

pub fn region_contains(region: &SdofRegion, point: &Point) -> bool {
    region.contains(point)
}

/// One row of a CSIT-mode sweep. `value` is `None` where the mode's formula
/// is undefined (partial CSIT with `m <= max(nA, nB)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub m: u32,
    pub mode: CsitMode,
    pub value: Option<Rational>,
}

/// Wiretap SDoF for every `m` in `ms` and every mode, `m`-major.
pub fn sweep(na: u32, nb: u32, ms: std::ops::RangeInclusive<u32>, modes: &[CsitMode]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for m in ms {
        let cfg = AntennaConfig::new(m, na, nb)?;
        for &mode in modes {
            let value = match sdof_wiretap(cfg, mode) {
                Ok(v) => Some(v),
                Err(Error::OutOfTheoremRange { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(SweepRow { m, mode, value });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: u32, na: u32, nb: u32) -> AntennaConfig {
        AntennaConfig::new(m, na, nb).unwrap()
    }

    #[test]
    fn rejects_zero_antennas() {
        assert!(AntennaConfig::new(0, 1, 1).is_err());
        assert!(AntennaConfig::new(1, 0, 1).is_err());
    }

    #[test]
    fn delayed_wiretap_values() {
        assert_eq!(sdof_wiretap_delayed(cfg(2, 1, 1)), rat(2, 3));
        assert_eq!(sdof_wiretap_delayed(cfg(1, 1, 1)), rat(0, 1));
        assert_eq!(sdof_wiretap_delayed(cfg(5, 3, 2)), rat(15, 7));
        assert_eq!(sdof_wiretap_delayed(cfg(9, 3, 2)), rat(15, 7));
        assert_eq!(sdof_wiretap_delayed(cfg(3, 3, 2)), rat(1, 1));
    }

    #[test]
    fn partial_wiretap_values_and_range() {
        assert_eq!(sdof_wiretap_partial(cfg(4, 3, 2)).unwrap(), rat(3, 2));
        assert_eq!(sdof_wiretap_partial(cfg(9, 3, 2)).unwrap(), rat(9, 5));
        assert!(matches!(
            sdof_wiretap_partial(cfg(3, 3, 2)),
            Err(Error::OutOfTheoremRange { .. })
        ));
    }

    #[test]
    fn mode_dispatch() {
        let c = cfg(4, 3, 2);
        assert_eq!(sdof_wiretap(c, CsitMode::Perfect).unwrap(), rat(2, 1));
        assert_eq!(sdof_wiretap(c, CsitMode::NoCsit).unwrap(), rat(1, 1));
        assert_eq!(sdof_wiretap(c, CsitMode::Delayed).unwrap(), rat(12, 7));
        assert_eq!(sdof_wiretap(cfg(6, 3, 2), CsitMode::Perfect).unwrap(), rat(3, 1));
        // below max(nA, nB) every mode collapses to (m - nB)^+
        for m in 1..=3 {
            let c = cfg(m, 3, 2);
            let expected = Rational::from_integer((i64::from(m) - 2).max(0));
            assert_eq!(sdof_wiretap(c, CsitMode::Perfect).unwrap(), expected);
            assert_eq!(sdof_wiretap(c, CsitMode::NoCsit).unwrap(), expected);
            assert_eq!(sdof_wiretap(c, CsitMode::Delayed).unwrap(), expected);
        }
    }

    #[test]
    fn delayed_cases_agree_at_saturation() {
        for na in 1..8 {
            for nb in 1..8 {
                let (a, b) = (i64::from(na), i64::from(nb));
                let m = a + b;
                let third = rat(a * m * (m - b), a * b + m * (m - b));
                let fourth = rat(a * (a + b), a + 2 * b);
                assert_eq!(third, fourth);
            }
        }
    }

    #[test]
    fn bcc_region_example() {
        let r = bcc_region_delayed(cfg(5, 3, 2));
        assert_eq!(
            r.vertices(),
            &[(rat(15, 7), rat(0, 1)), (rat(9, 5), rat(4, 5)), (rat(0, 1), rat(5, 4))]
        );
    }

    #[test]
    fn bcc_region_degenerate_cases() {
        let seg = bcc_region_delayed(cfg(3, 3, 2));
        assert_eq!(seg.vertices(), &[(rat(1, 1), rat(0, 1))]);
        assert!(seg.contains(&(rat(1, 2), rat(0, 1))));
        assert!(!seg.contains(&(rat(1, 2), rat(1, 10))));

        let seg_b = bcc_region_delayed(cfg(3, 2, 3));
        assert_eq!(seg_b.vertices(), &[(rat(0, 1), rat(1, 1))]);

        let point = bcc_region_delayed(cfg(1, 2, 2));
        assert_eq!(point.vertices(), &[(rat(0, 1), rat(0, 1))]);
        assert!(!point.contains(&(rat(1, 100), rat(0, 1))));
    }

    #[test]
    fn sum_points() {
        assert_eq!(bcc_sum_point(cfg(5, 3, 2)).unwrap(), (rat(9, 5), rat(4, 5)));
        assert_eq!(bcc_sum_point(cfg(2, 1, 1)).unwrap(), (rat(1, 2), rat(1, 2)));
        assert_eq!(bcc_sum_point(cfg(10, 3, 2)).unwrap(), (rat(9, 5), rat(4, 5)));
        assert!(bcc_sum_point(cfg(3, 3, 2)).is_err());
    }

    #[test]
    fn dof_region_vertices() {
        let r = bc_dof_region_delayed(cfg(5, 3, 2));
        assert!(r.vertices().contains(&(rat(45, 19), rat(20, 19))));
        let tri = bc_dof_region_delayed(cfg(1, 1, 1));
        assert_eq!(tri.vertices(), &[(rat(1, 1), rat(0, 1)), (rat(0, 1), rat(1, 1))]);
        let delayed = bcc_region_delayed(cfg(5, 3, 2));
        assert!(delayed.vertices().iter().all(|v| r.contains(v)));
    }

    #[test]
    fn perfect_rectangles() {
        let corners = |m| bcc_region_perfect(cfg(m, 3, 2)).unwrap().vertices().to_vec();
        let r = |a, b| vec![(rat(a, 1), rat(0, 1)), (rat(a, 1), rat(b, 1)), (rat(0, 1), rat(b, 1))];
        assert_eq!(corners(5), r(3, 2));
        assert_eq!(corners(6), r(3, 2));
        assert_eq!(corners(4), r(2, 1));
        assert!(bcc_region_perfect(cfg(3, 3, 2)).is_err());
    }

    #[test]
    fn containment_examples() {
        let r = bcc_region_delayed(cfg(5, 3, 2));
        let sum = (rat(9, 5), rat(4, 5));
        assert!(region_contains(&r, &sum));
        assert!(r.halfplanes().iter().all(|h| h.is_tight(&sum)));
        assert!(region_contains(&r, &(rat(0, 1), rat(0, 1))));
        assert!(!region_contains(&r, &(rat(3, 1), rat(2, 1))));
    }

    #[test]
    fn sweep_marks_undefined_partial_rows() {
        let rows = sweep(3, 2, 1..=8, &CsitMode::ALL).unwrap();
        assert_eq!(rows.len(), 32);
        let partial_at = |m| {
            rows.iter()
                .find(|r| r.m == m && r.mode == CsitMode::DelayedPartial)
                .unwrap()
                .value
        };
        assert_eq!(partial_at(3), None);
        assert_eq!(partial_at(4), Some(rat(3, 2)));
    }

    #[test]
    fn csit_mode_parsing() {
        assert_eq!("delayed".parse::<CsitMode>().unwrap(), CsitMode::Delayed);
        assert_eq!("partial".parse::<CsitMode>().unwrap(), CsitMode::DelayedPartial);
        assert_eq!("none".parse::<CsitMode>().unwrap(), CsitMode::NoCsit);
        assert!("sometimes".parse::<CsitMode>().is_err());
    }
}

//! Lattice discretisation of `Ω_ε = Ω ∪ Γ_ε` with precomputed ball neighbourhoods.
//!
//! Points live on an axis-aligned lattice of spacing `h` anchored at the box
//! corner `lo` (box) or at the centre (ball, annulus). A point is `Interior` iff it
//! lies strictly inside Ω by the analytic shape formula; points on ∂Ω or outside Ω
//! within distance ε of it form the strip. Balls are open everywhere: a neighbour
//! at distance exactly `t` is not in `B_t`.
//!
//! Every interior ball `B_ε(x)` has the same lattice offset set, so the table is
//! stored once as a list of offsets sorted by `(distance, lexicographic offset)`.
//! Because point indices follow the lexicographic order of lattice coordinates,
//! that order coincides with `(distance, point index)` at every interior point.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecmath;

/// Relative slack used when deciding whether a lattice offset sits on the sphere `|o| h = ε`.
const SPHERE_TIE_REL: f64 = 1e-12;
/// Relative slack on the strip width so lattice points at distance ε (up to rounding) are kept.
const STRIP_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Annulus {
        center: Vec<f64>,
        inner_radius: f64,
        outer_radius: f64,
    },
}

/// Analytic description of the bounded domain Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub shape: Shape,
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        Self::rect(vec![0.0, 0.0], vec![1.0, 1.0])
    }

    pub fn rect(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        DomainSpec {
            shape: Shape::Box { lo, hi },
        }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        DomainSpec {
            shape: Shape::Ball { center, radius },
        }
    }

    pub fn annulus(center: Vec<f64>, inner_radius: f64, outer_radius: f64) -> Self {
        DomainSpec {
            shape: Shape::Annulus {
                center,
                inner_radius,
                outer_radius,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, .. } => lo.len(),
            Shape::Ball { center, .. } | Shape::Annulus { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Config(format!("dimension must be at least 2, got {n}")));
        }
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match &self.shape {
            Shape::Box { lo, hi } => {
                if hi.len() != n || !finite(lo) || !finite(hi) {
                    return Err(Error::Config("box corners must be finite and of equal dimension".into()));
                }
                if lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(Error::Config("box requires lo < hi componentwise".into()));
                }
            }
            Shape::Ball { center, radius } => {
                if !finite(center) || !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Config("ball requires a finite centre and radius > 0".into()));
                }
            }
            Shape::Annulus {
                center,
                inner_radius,
                outer_radius,
            } => {
                if !finite(center) {
                    return Err(Error::Config("annulus centre must be finite".into()));
                }
                if !(*inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
                    return Err(Error::Config(
                        "annulus requires 0 < inner_radius < outer_radius".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Strict membership in the open set Ω.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(c, (a, b))| a < c && c < b),
            Shape::Ball { center, radius } => vecmath::dist(x, center) < *radius,
            Shape::Annulus {
                center,
                inner_radius,
                outer_radius,
            } => {
                let d = vecmath::dist(x, center);
                *inner_radius < d && d < *outer_radius
            }
        }
    }

    /// Signed distance to ∂Ω: negative inside, positive outside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let q: Vec<f64> = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (a, b))| {
                        let mid = 0.5 * (a + b);
                        (c - mid).abs() - 0.5 * (b - a)
                    })
                    .collect();
                let outside = q.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
                let inside = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max).min(0.0);
                outside + inside
            }
            Shape::Ball { center, radius } => vecmath::dist(x, center) - radius,
            Shape::Annulus {
                center,
                inner_radius,
                outer_radius,
            } => {
                let d = vecmath::dist(x, center);
                (d - outer_radius).max(inner_radius - d)
            }
        }
    }

    /// Distance from `x` to the boundary ∂Ω.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.signed_distance(x).abs()
    }

    fn lattice_anchor(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Box { lo, .. } => lo.clone(),
            Shape::Ball { center, .. } | Shape::Annulus { center, .. } => center.clone(),
        }
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Box { lo, hi } => (lo.clone(), hi.clone()),
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Annulus {
                center, outer_radius, ..
            } => (
                center.iter().map(|c| c - outer_radius).collect(),
                center.iter().map(|c| c + outer_radius).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    Interior,
    Strip,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Interior => "interior",
            RegionLabel::Strip => "strip",
        }
    }
}

/// Result of [`classify`]: a region label or "too far from Ω to matter".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Region(RegionLabel),
    Outside,
}

pub fn classify(spec: &DomainSpec, eps: f64, x: &[f64]) -> Classification {
    if spec.contains(x) {
        Classification::Region(RegionLabel::Interior)
    } else if spec.boundary_distance(x) <= eps * (1.0 + STRIP_REL) {
        Classification::Region(RegionLabel::Strip)
    } else {
        Classification::Outside
    }
}

/// One entry of the shared neighbour table.
#[derive(Debug, Clone, PartialEq)]
pub struct Offset {
    pub lattice: Vec<i64>,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    spec: DomainSpec,
    h: f64,
    eps: f64,
    dim: usize,
    anchor: Vec<f64>,
    /// Flat `len × dim` coordinates.
    coords: Vec<f64>,
    lattice: Vec<Vec<i64>>,
    region: Vec<RegionLabel>,
    lookup: HashMap<Vec<i64>, usize>,
    interior: Vec<usize>,
    interior_slot: Vec<Option<usize>>,
    offsets: Vec<Offset>,
    /// `(distance, end)` per distinct distance; `end` is exclusive into `offsets`.
    layers: Vec<(f64, usize)>,
    /// Flat `interior.len() × offsets.len()` point indices.
    neighbors: Vec<u32>,
}

impl DiscreteDomain {
    pub fn build(spec: DomainSpec, h: f64, eps: f64) -> Result<Self> {
        spec.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("grid spacing h must be > 0, got {h}")));
        }
        if !(eps > 0.0) {
            return Err(Error::Config(format!("step bound ε must be > 0, got {eps}")));
        }
        if eps >= 1.0 {
            return Err(Error::Config(format!("step bound ε must be < 1, got {eps}")));
        }
        if eps < h {
            return Err(Error::Config(format!(
                "ε < h: step bound {eps} is smaller than grid spacing {h}"
            )));
        }
        let dim = spec.dim();
        let anchor = spec.lattice_anchor();
        let (bb_lo, bb_hi) = spec.bounding_box();
        let ranges: Vec<(i64, i64)> = (0..dim)
            .map(|d| {
                let lo = ((bb_lo[d] - eps - anchor[d]) / h - 1e-9).ceil() as i64;
                let hi = ((bb_hi[d] + eps - anchor[d]) / h + 1e-9).floor() as i64;
                (lo, hi)
            })
            .collect();

        let mut coords = Vec::new();
        let mut lattice = Vec::new();
        let mut region = Vec::new();
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        let mut x = vec![0.0; dim];
        'outer: loop {
            for d in 0..dim {
                x[d] = anchor[d] + k[d] as f64 * h;
            }
            if let Classification::Region(label) = classify(&spec, eps, &x) {
                coords.extend_from_slice(&x);
                lattice.push(k.clone());
                region.push(label);
            }
            // Odometer with the last axis fastest: lexicographic order in k.
            let mut d = dim;
            loop {
                if d == 0 {
                    break 'outer;
                }
                d -= 1;
                if k[d] < ranges[d].1 {
                    k[d] += 1;
                    for later in k.iter_mut().skip(d + 1).zip(ranges.iter().skip(d + 1)) {
                        *later.0 = later.1 .0;
                    }
                    break;
                }
            }
        }

        let interior: Vec<usize> = (0..region.len())
            .filter(|&i| region[i] == RegionLabel::Interior)
            .collect();
        if interior.is_empty() {
            return Err(Error::Config(
                "empty interior: no lattice point lies strictly inside the domain".into(),
            ));
        }
        let mut interior_slot = vec![None; region.len()];
        for (slot, &i) in interior.iter().enumerate() {
            interior_slot[i] = Some(slot);
        }
        let lookup: HashMap<Vec<i64>, usize> =
            lattice.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();

        let offsets = ball_offsets(dim, h, eps);
        let mut layers: Vec<(f64, usize)> = Vec::new();
        for (j, o) in offsets.iter().enumerate() {
            match layers.last_mut() {
                Some(last) if last.0 == o.distance => last.1 = j + 1,
                _ => layers.push((o.distance, j + 1)),
            }
        }

        let mut neighbors = Vec::with_capacity(interior.len() * offsets.len());
        for &i in &interior {
            for o in &offsets {
                let key: Vec<i64> = lattice[i].iter().zip(&o.lattice).map(|(a, b)| a + b).collect();
                let j = *lookup.get(&key).ok_or_else(|| {
                    Error::Domain(format!(
                        "lattice point {key:?} within ε of interior point {i} is missing from Ω_ε"
                    ))
                })?;
                neighbors.push(j as u32);
            }
        }

        Ok(DiscreteDomain {
            spec,
            h,
            eps,
            dim,
            anchor,
            coords,
            lattice,
            region,
            lookup,
            interior,
            interior_slot,
            offsets,
            layers,
            neighbors,
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.region.len()
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn lattice_index(&self, i: usize) -> &[i64] {
        &self.lattice[i]
    }

    pub fn region(&self, i: usize) -> RegionLabel {
        self.region[i]
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.region[i] == RegionLabel::Interior
    }

    pub fn interior_points(&self) -> &[usize] {
        &self.interior
    }

    pub fn strip_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.region[i] == RegionLabel::Strip)
    }

    /// Sorted offsets of the open ε-ball, shared by every interior point.
    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    /// `(distance, exclusive end)` of each distinct-distance layer of the table.
    pub fn layers(&self) -> &[(f64, usize)] {
        &self.layers
    }

    /// Number of lattice points in the open ε-ball (centre included).
    pub fn ball_population(&self) -> usize {
        self.offsets.len()
    }

    /// Point indices of the full ε-ball table of interior point `i`.
    pub fn neighbor_indices(&self, i: usize) -> Result<&[u32]> {
        let slot = self.interior_slot[i].ok_or_else(|| {
            Error::Domain(format!("point {i} is not interior; neighbour tables cover interior points only"))
        })?;
        let m = self.offsets.len();
        Ok(&self.neighbors[slot * m..(slot + 1) * m])
    }

    /// Number of table entries with distance strictly below `radius`.
    pub fn prefix_len(&self, radius: f64) -> usize {
        self.offsets.partition_point(|o| o.distance < radius)
    }

    /// Neighbours of interior point `i` at distance `< radius`, ascending in distance.
    pub fn ball_neighbors(&self, i: usize, radius: f64) -> Result<Vec<(f64, usize)>> {
        if radius > self.eps {
            return Err(Error::Query(format!(
                "radius {radius} exceeds ε = {}; tables only cover B_ε",
                self.eps
            )));
        }
        let idx = self.neighbor_indices(i)?;
        let len = self.prefix_len(radius);
        Ok(self.offsets[..len]
            .iter()
            .zip(idx)
            .map(|(o, &j)| (o.distance, j as usize))
            .collect())
    }

    /// Stored lattice point nearest to `x` (ties by smallest index), if any lies within `tol`.
    pub fn nearest_point(&self, x: &[f64], tol: f64) -> Option<usize> {
        let k: Vec<i64> = x
            .iter()
            .zip(&self.anchor)
            .map(|(c, a)| ((c - a) / self.h).round() as i64)
            .collect();
        // The rounded lattice cell is the nearest lattice point; if it was not stored
        // search the surrounding cells among stored points.
        let mut best: Option<(f64, usize)> = None;
        let mut probe = |key: &[i64]| {
            if let Some(&j) = self.lookup.get(key) {
                let d = vecmath::dist(self.point(j), x);
                if best.is_none_or(|(bd, bj)| d < bd || (d == bd && j < bj)) {
                    best = Some((d, j));
                }
            }
        };
        let n = self.dim;
        let mut off = vec![-1i64; n];
        loop {
            let key: Vec<i64> = k.iter().zip(&off).map(|(a, b)| a + b).collect();
            probe(&key);
            let mut d = 0;
            loop {
                if d == n {
                    return best.filter(|(dist, _)| *dist <= tol).map(|(_, j)| j);
                }
                if off[d] < 1 {
                    off[d] += 1;
                    break;
                }
                off[d] = -1;
                d += 1;
            }
        }
    }

    /// Point index of the lattice coordinate `k`, if stored.
    pub fn index_of_lattice(&self, k: &[i64]) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    /// Whether the ε-ball offset set of interior point `i` is closed under negation
    /// with every member stored. Always true on a uniform lattice, kept as a check.
    pub fn has_symmetric_ball(&self, i: usize) -> bool {
        if !self.is_interior(i) {
            return false;
        }
        let base = &self.lattice[i];
        self.offsets.iter().all(|o| {
            let reflected: Vec<i64> = base.iter().zip(&o.lattice).map(|(a, b)| a - b).collect();
            self.lookup.contains_key(&reflected)
        })
    }
}

/// Integer offsets `o` with `|o| h < ε`, sorted by `(distance, lexicographic o)`.
fn ball_offsets(dim: usize, h: f64, eps: f64) -> Vec<Offset> {
    let ratio = eps / h;
    let reach = ratio.ceil() as i64;
    let limit = ratio * ratio * (1.0 - SPHERE_TIE_REL);
    let mut out = Vec::new();
    let mut o = vec![-reach; dim];
    loop {
        let n2: i64 = o.iter().map(|c| c * c).sum();
        if (n2 as f64) < limit {
            out.push(Offset {
                lattice: o.clone(),
                distance: h * (n2 as f64).sqrt(),
            });
        }
        let mut d = dim;
        loop {
            if d == 0 {
                out.sort_by(|a, b| {
                    a.distance
                        .total_cmp(&b.distance)
                        .then_with(|| a.lattice.cmp(&b.lattice))
                });
                return out;
            }
            d -= 1;
            if o[d] < reach {
                o[d] += 1;
                for c in o.iter_mut().skip(d + 1) {
                    *c = -reach;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn square(h: f64, eps: f64) -> DiscreteDomain {
        DiscreteDomain::build(DomainSpec::unit_square(), h, eps).unwrap()
    }

    #[test]
    fn coarse_square_has_single_interior_point() {
        let d = square(0.5, 0.5);
        assert_eq!(d.interior_points().len(), 1);
        let i = d.interior_points()[0];
        assert_eq!(d.point(i), &[0.5, 0.5]);
        // 5×5 lattice on [-0.5, 1.5]² minus the four corners at distance √0.5 > ε.
        assert_eq!(d.len(), 21);
    }

    #[test]
    fn eps_below_h_is_rejected() {
        let err = DiscreteDomain::build(DomainSpec::unit_square(), 0.25, 0.1).unwrap_err();
        assert!(err.to_string().contains("ε < h"), "{err}");
    }

    #[test]
    fn other_precondition_failures() {
        assert!(DiscreteDomain::build(DomainSpec::unit_square(), 0.0, 0.1).is_err());
        assert!(DiscreteDomain::build(DomainSpec::unit_square(), 0.1, 0.0).is_err());
        assert!(DiscreteDomain::build(DomainSpec::rect(vec![0.0, 0.0], vec![0.1, 0.1]), 0.1, 0.2).is_err());
        assert!(DomainSpec::annulus(vec![0.0, 0.0], 1.0, 0.5).validate().is_err());
        assert!(DomainSpec::rect(vec![0.0, 1.0], vec![1.0, 1.0]).validate().is_err());
        assert!(DomainSpec::ball(vec![0.0], 1.0).validate().is_err());
    }

    #[test]
    fn centre_of_box_is_interior() {
        let d = square(0.125, 0.25);
        let c = d.nearest_point(&[0.5, 0.5], 1e-12).unwrap();
        assert_eq!(d.region(c), RegionLabel::Interior);
    }

    #[test]
    fn classify_examples() {
        let ann = DomainSpec::annulus(vec![0.0, 0.0], 0.25, 1.0);
        assert_eq!(classify(&ann, 0.1, &[0.5, 0.0]), Classification::Region(RegionLabel::Interior));
        assert_eq!(classify(&ann, 0.1, &[0.0, 1.05]), Classification::Region(RegionLabel::Strip));
        assert_eq!(classify(&ann, 0.1, &[0.0, 0.0]), Classification::Outside);
        let sq = DomainSpec::unit_square();
        assert_eq!(classify(&sq, 0.1, &[2.0, 2.0]), Classification::Outside);
        // Boundary points belong to the strip.
        assert_eq!(classify(&sq, 0.1, &[1.0, 0.5]), Classification::Region(RegionLabel::Strip));
    }

    #[test]
    fn radius_zero_is_empty_and_eps_is_full() {
        let d = square(1.0 / 16.0, 0.25);
        let i = d.nearest_point(&[0.5, 0.5], 1e-12).unwrap();
        assert!(d.ball_neighbors(i, 0.0).unwrap().is_empty());
        let full = d.ball_neighbors(i, d.eps()).unwrap();
        assert_eq!(full.len(), d.ball_population());
        assert_eq!(full[0], (0.0, i));
        assert!(d.ball_neighbors(i, 0.3).is_err());
    }

    #[test]
    fn lattice_ball_of_two_and_a_half_spacings_has_21_points() {
        // h = 0.1, radius 0.25 is the unit lattice with radius 2.5 rescaled.
        // Oracle: enumerate integer offsets with i² + j² < 6.25.
        let expected: HashSet<(i64, i64)> = (-3..=3)
            .flat_map(|i| (-3..=3).map(move |j| (i, j)))
            .filter(|(i, j)| ((i * i + j * j) as f64) < 6.25)
            .collect();
        assert_eq!(expected.len(), 21);
        let d = DiscreteDomain::build(DomainSpec::unit_square(), 0.1, 0.25).unwrap();
        let c = d.index_of_lattice(&[5, 5]).unwrap();
        let got: HashSet<(i64, i64)> = d
            .ball_neighbors(c, 0.25)
            .unwrap()
            .iter()
            .map(|&(_, j)| {
                let k = d.lattice_index(j);
                (k[0] - 5, k[1] - 5)
            })
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn neighbor_table_sorted_and_open() {
        let d = DiscreteDomain::build(DomainSpec::annulus(vec![0.0, 0.0], 0.25, 1.0), 0.05, 0.2).unwrap();
        for &i in d.interior_points().iter().step_by(37) {
            let nb = d.ball_neighbors(i, d.eps()).unwrap();
            assert_eq!(nb[0], (0.0, i));
            for w in nb.windows(2) {
                assert!(w[0].0 <= w[1].0);
                if w[0].0 == w[1].0 {
                    assert!(w[0].1 < w[1].1, "ties must be ordered by index");
                }
            }
            for &(dist, j) in &nb {
                assert!(dist < d.eps());
                assert!((vecmath::dist(d.point(i), d.point(j)) - dist).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stored_labels_match_classify() {
        for spec in [
            DomainSpec::unit_square(),
            DomainSpec::ball(vec![0.1, -0.2], 0.7),
            DomainSpec::annulus(vec![0.0, 0.0], 0.25, 1.0),
        ] {
            let d = DiscreteDomain::build(spec.clone(), 0.05, 0.15).unwrap();
            for i in 0..d.len() {
                assert_eq!(classify(&spec, d.eps(), d.point(i)), Classification::Region(d.region(i)));
            }
        }
    }

    #[test]
    fn points_are_lexicographic() {
        let d = square(0.125, 0.25);
        for i in 1..d.len() {
            assert!(d.lattice_index(i - 1) < d.lattice_index(i));
        }
    }

    #[test]
    fn interior_balls_are_symmetric() {
        let d = DiscreteDomain::build(DomainSpec::annulus(vec![0.0, 0.0], 0.25, 1.0), 0.05, 0.2).unwrap();
        assert!(d.interior_points().iter().all(|&i| d.has_symmetric_ball(i)));
        let set: HashSet<Vec<i64>> = d.offsets().iter().map(|o| o.lattice.clone()).collect();
        for o in d.offsets() {
            let neg: Vec<i64> = o.lattice.iter().map(|c| -c).collect();
            assert!(set.contains(&neg));
        }
    }

    #[test]
    fn three_dimensional_box_builds() {
        let d = DiscreteDomain::build(DomainSpec::rect(vec![0.0; 3], vec![1.0; 3]), 0.25, 0.5).unwrap();
        assert_eq!(d.interior_points().len(), 27);
        // |o| < 2 on the unit lattice in 3-D: 1 + 6 + 12 + 8 = 27
        assert_eq!(d.ball_population(), 27);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn smaller_radius_gives_prefix(r1 in 0.0f64..0.25, r2 in 0.0f64..0.25, pick in 0usize..1000) {
                let d = square(1.0 / 32.0, 0.25);
                let i = d.interior_points()[pick % d.interior_points().len()];
                let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                let a = d.ball_neighbors(i, lo).unwrap();
                let b = d.ball_neighbors(i, hi).unwrap();
                prop_assert!(a.len() <= b.len());
                prop_assert_eq!(&b[..a.len()], &a[..]);
                prop_assert!(a.iter().all(|&(dist, _)| dist < lo));
                prop_assert!(b[a.len()..].iter().all(|&(dist, _)| dist >= lo));
            }
        }
    }
}

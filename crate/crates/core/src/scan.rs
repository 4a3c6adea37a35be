//! Convergence of the deformed system to the classical one as `z → 0`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::catalog::{make_class, ClassTag};
use crate::deformation::{deform_hamiltonians, deform_vector_fields};
use crate::error::{Error, Result};

/// A rectangular grid `[x0, x1] x [y0, y1]` with `n` points per side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub n: usize,
}

impl GridSpec {
    /// A grid inside the class domain, bounded away from its singular set.
    pub fn default_for(tag: ClassTag) -> Self {
        match tag {
            ClassTag::P2 | ClassTag::I5 => GridSpec {
                x0: -1.0,
                x1: 1.0,
                y0: 0.5,
                y1: 2.0,
                n: 21,
            },
            ClassTag::I4 => GridSpec {
                x0: 1.0,
                x1: 2.0,
                y0: -1.0,
                y1: 0.0,
                n: 21,
            },
        }
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        let lerp = |a: f64, b: f64, i: usize| {
            if self.n == 1 {
                a
            } else {
                a + (b - a) * i as f64 / (self.n - 1) as f64
            }
        };
        (0..self.n)
            .flat_map(|i| {
                (0..self.n).map(move |j| [lerp(self.x0, self.x1, i), lerp(self.y0, self.y1, j)])
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `"x0,x1,y0,y1,n"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidConfiguration(format!("grid must be \"x0,x1,y0,y1,n\", got {s:?}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(bad());
        }
        let mut v = [0.0f64; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|_| bad())?;
            if !slot.is_finite() {
                return Err(bad());
            }
        }
        let n: usize = parts[4].parse().map_err(|_| bad())?;
        if n == 0 || v[1] < v[0] || v[3] < v[2] {
            return Err(bad());
        }
        Ok(GridSpec {
            x0: v[0],
            x1: v[1],
            y0: v[2],
            y1: v[3],
            n,
        })
    }
}

/// Sup-norm deviations at one value of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub z: f64,
    pub h_dev: [f64; 3],
    pub x_dev: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable {
    pub class: ClassTag,
    pub grid_points: usize,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// `dev(z_{k−1}) / dev(z_k)` for row `k ≥ 1`; `None` when undefined.
    pub fn ratios(&self, k: usize) -> Option<([f64; 3], [f64; 3])> {
        if k == 0 || k >= self.rows.len() {
            return None;
        }
        let (prev, cur) = (&self.rows[k - 1], &self.rows[k]);
        Some((
            std::array::from_fn(|i| prev.h_dev[i] / cur.h_dev[i]),
            std::array::from_fn(|i| prev.x_dev[i] / cur.x_dev[i]),
        ))
    }

    /// Header plus one row per `z`; values with 17 significant digits, and
    /// empty ratio cells where the ratio is undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "z,dev_h1,dev_h2,dev_h3,dev_X1,dev_X2,dev_X3,ratio_h1,ratio_h2,ratio_h3,ratio_X1,ratio_X2,ratio_X3\n",
        );
        for (k, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:.16e}", row.z);
            for v in row.h_dev.iter().chain(&row.x_dev) {
                let _ = write!(out, ",{v:.16e}");
            }
            let ratios: Vec<f64> = match self.ratios(k) {
                Some((h, x)) => h.into_iter().chain(x).collect(),
                None => vec![f64::NAN; 6],
            };
            for r in ratios {
                if r.is_finite() {
                    let _ = write!(out, ",{r:.16e}");
                } else {
                    out.push(',');
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Deviations of `h_{z,i}` from `h_i` and `X_{z,i}` from `X_i` over the
/// in-domain points of `grid`, for each `z` of a strictly decreasing,
/// non-negative sequence.
pub fn limit_scan(tag: ClassTag, z_seq: &[f64], grid: &GridSpec) -> Result<ScanTable> {
    if z_seq.is_empty() {
        return Err(Error::InvalidArgument("empty z sequence".into()));
    }
    if z_seq.iter().any(|z| !(z.is_finite() && *z >= 0.0)) || z_seq.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidArgument(format!(
            "z sequence must be non-negative and decreasing, got {z_seq:?}"
        )));
    }
    let sys = make_class(tag, None)?;
    let points: Vec<[f64; 2]> = grid
        .points()
        .into_iter()
        .filter(|p| sys.domain.contains(p))
        .collect();
    if points.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "grid {grid:?} has no points inside the {tag} domain"
        )));
    }
    let mut rows = Vec::with_capacity(z_seq.len());
    for &z in z_seq {
        let (h, x) = (
            deform_hamiltonians(&sys, z)?,
            deform_vector_fields(&sys, z)?,
        );
        let mut h_dev = [0.0f64; 3];
        let mut x_dev = [0.0f64; 3];
        for &p in &points {
            for i in 0..3 {
                h_dev[i] = h_dev[i].max((h[i].eval(p)? - sys.h[i].eval(p)?).abs());
                let (a, b) = (x[i].eval(p)?, sys.x[i].eval(p)?);
                x_dev[i] = x_dev[i].max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
            }
        }
        rows.push(ScanRow { z, h_dev, x_dev });
    }
    Ok(ScanTable {
        class: tag,
        grid_points: points.len(),
        rows,
    })
}

/// `z0, z0/2, …` down to `z_min` inclusive.
pub fn halving_sequence(z0: f64, z_min: f64) -> Vec<f64> {
    let mut out = vec![z0];
    while let Some(&z) = out.last() {
        let next = z / 2.0;
        if next < z_min * (1.0 - 1e-12) {
            break;
        }
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "-1,1,0.5,2,11".parse().unwrap();
        assert_eq!(
            g,
            GridSpec {
                x0: -1.0,
                x1: 1.0,
                y0: 0.5,
                y1: 2.0,
                n: 11
            }
        );
        assert_eq!(g.points().len(), 121);
        assert!("1,2,3".parse::<GridSpec>().is_err());
        assert!("1,0,0,1,3".parse::<GridSpec>().is_err());
        assert!("0,1,0,1,0".parse::<GridSpec>().is_err());
        assert!("0,1,0,1,x".parse::<GridSpec>().is_err());
    }

    #[test]
    fn halving() {
        assert_eq!(
            halving_sequence(0.2, 0.0125),
            vec![0.2, 0.1, 0.05, 0.025, 0.0125]
        );
    }

    #[test]
    fn p2_ratios_near_four() {
        let t = limit_scan(
            ClassTag::P2,
            &[0.2, 0.1, 0.05],
            &GridSpec::default_for(ClassTag::P2),
        )
        .unwrap();
        for k in 1..3 {
            let (h, x) = t.ratios(k).unwrap();
            for i in 1..3 {
                assert!((3.4..=4.6).contains(&h[i]), "{h:?}");
                assert!((3.4..=4.6).contains(&x[i]), "{x:?}");
            }
        }
        assert_eq!(t.rows[0].h_dev[0], 0.0);
        assert_eq!(t.rows[0].x_dev[0], 0.0);
    }

    #[test]
    fn zero_alone_has_no_deviation() {
        let t = limit_scan(ClassTag::I4, &[0.0], &GridSpec::default_for(ClassTag::I4)).unwrap();
        assert_eq!(t.rows[0].h_dev, [0.0; 3]);
        assert_eq!(t.rows[0].x_dev, [0.0; 3]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,,,,"));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let g: GridSpec = "-1,1,-2,-1,5".parse().unwrap();
        assert!(matches!(
            limit_scan(ClassTag::P2, &[0.1], &g),
            Err(Error::InvalidArgument(_))
        ));
        assert!(limit_scan(
            ClassTag::P2,
            &[0.1, 0.2],
            &GridSpec::default_for(ClassTag::P2)
        )
        .is_err());
        assert!(limit_scan(ClassTag::P2, &[], &GridSpec::default_for(ClassTag::P2)).is_err());
    }

    #[test]
    fn csv_format() {
        let t = limit_scan(ClassTag::I5, &[0.1, 0.05], &"0,1,1,2,3".parse().unwrap()).unwrap();
        let csv = t.to_csv();
        let second: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(second.len(), 13);
        assert_eq!(second[0], "5.0000000000000003e-2");
        assert_eq!(second[7], "");
        assert!(second[8].parse::<f64>().unwrap() > 3.0);
    }
}

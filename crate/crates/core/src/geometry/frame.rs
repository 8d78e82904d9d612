use serde::Serialize;

use super::chart::SurfaceChart;
use crate::tensor::{Vec4, MAX_ORDER};
use crate::{Error, Result};

/// Charts whose metric determinant drops to this value are treated as degenerate.
pub const DEGENERATE_METRIC_THRESHOLD: f64 = 1e-12;

/// Curvature data in the adapted Lagrangian frame `e1, e2, n1 = Je1, n2 = Je2` at a point.
///
/// The frame is built by Gram–Schmidt from `(x_u, x_v)` with `e1 ∝ x_u`. Components use the
/// index layout `h[i][j][k] = h_{ij}^{k*} = ⟨h(e_i, e_j), Je_k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFrame {
    pub u: f64,
    pub v: f64,
    pub x: Vec4,
    pub e: [Vec4; 2],
    pub n: [Vec4; 2],
    /// Coordinate metric `g_ab = ⟨x_a, x_b⟩`.
    pub metric: [[f64; 2]; 2],
    pub h: [[[f64; 2]; 2]; 2],
    /// Mean curvature components `H^{k*} = h_{11}^{k*} + h_{22}^{k*}`.
    pub mean: [f64; 2],
    /// `|H|²`
    pub h2: f64,
    /// `|A|²`
    pub a2: f64,
    /// Gauss curvature from the scalar Gauss equation, `K = (|H|² - |A|²) / 2`.
    pub gauss_k: f64,
    pub x_tan: Vec4,
    pub x_nor: Vec4,
    /// `sqrt(det g)`
    pub area_density: f64,
    /// Orthonormal frame in coordinates: `e_i = Σ_a frame_coeffs[i][a] ∂_a`.
    pub frame_coeffs: [[f64; 2]; 2],
}

impl PointFrame {
    /// `H^{k*} + ⟨x, n_k⟩` for both normal directions; zero on a self-shrinker.
    pub fn shrinker_defects(&self) -> [f64; 2] {
        std::array::from_fn(|k| self.mean[k] + self.x.dot(&self.n[k]))
    }

    /// Largest deviation of `h_{ij}^{k*}` from total symmetry in `(i, j, k)`.
    pub fn symmetry_defect(&self) -> f64 {
        let h = &self.h;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let base = h[i][j][k];
                    for other in [h[j][i][k], h[j][k][i], h[k][i][j], h[i][k][j], h[k][j][i]] {
                        worst = worst.max((base - other).abs());
                    }
                }
            }
        }
        worst
    }

    /// `Σ_{i,j,k,l} H^{k*} H^{l*} h_{ij}^{k*} h_{ij}^{l*}`
    pub fn mean_weighted_square(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..2).map(|k| self.mean[k] * self.h[i][j][k]).sum();
                total += s * s;
            }
        }
        total
    }
}

/// Covariant derivative of the second fundamental form, `c[i][j][l][k] = h_{ij,l}^{k*}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradA {
    pub c: [[[[f64; 2]; 2]; 2]; 2],
    /// `|∇A|² = Σ (h_{ij,l}^{k*})²`
    pub norm_sq: f64,
}

impl GradA {
    /// Largest deviation from total symmetry over all 24 index permutations.
    pub fn symmetry_defect(&self) -> f64 {
        let c = &self.c;
        let mut worst: f64 = 0.0;
        for idx in 0..16usize {
            let ix = [idx & 1, (idx >> 1) & 1, (idx >> 2) & 1, (idx >> 3) & 1];
            let base = c[ix[0]][ix[1]][ix[2]][ix[3]];
            for p in PERMUTATIONS_4 {
                let q = [ix[p[0]], ix[p[1]], ix[p[2]], ix[p[3]]];
                worst = worst.max((base - c[q[0]][q[1]][q[2]][q[3]]).abs());
            }
        }
        worst
    }

    /// Normal covariant derivative of the mean curvature, `H^{k*}_{,i} = Σ_j h_{jj,i}^{k*}`.
    pub fn mean_derivative(&self) -> [[f64; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|k| self.c[0][0][i][k] + self.c[1][1][i][k]))
    }
}

const PERMUTATIONS_4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

/// Coordinate derivatives of the immersion up to third order. Index 0 is `u`, 1 is `v`.
struct Derivatives {
    x: Vec4,
    d1: [Vec4; 2],
    d2: [[Vec4; 2]; 2],
    d3: [[[Vec4; 2]; 2]; 2],
}

impl Derivatives {
    fn at(chart: &SurfaceChart, u: f64, v: f64) -> Self {
        let jets = chart.jet(u, v, MAX_ORDER);
        let pick = |idx: &[usize]| {
            let nv = idx.iter().filter(|&&d| d == 1).count();
            let nu = idx.len() - nv;
            Vec4(jets.map(|j| j.derivative(nu, nv)))
        };
        Derivatives {
            x: pick(&[]),
            d1: std::array::from_fn(|a| pick(&[a])),
            d2: std::array::from_fn(|a| std::array::from_fn(|b| pick(&[a, b]))),
            d3: std::array::from_fn(|a| {
                std::array::from_fn(|b| std::array::from_fn(|c| pick(&[a, b, c])))
            }),
        }
    }
}

struct Frame {
    e: [Vec4; 2],
    coeffs: [[f64; 2]; 2],
    metric: [[f64; 2]; 2],
    det: f64,
}

fn build_frame(d1: &[Vec4; 2], u: f64, v: f64) -> Result<Frame> {
    let metric = [
        [d1[0].dot(&d1[0]), d1[0].dot(&d1[1])],
        [d1[1].dot(&d1[0]), d1[1].dot(&d1[1])],
    ];
    let det = metric[0][0] * metric[1][1] - metric[0][1] * metric[1][0];
    if !(det > DEGENERATE_METRIC_THRESHOLD) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    let len_u = metric[0][0].sqrt();
    let e1 = d1[0].scale(1.0 / len_u);
    let proj = d1[1].dot(&e1);
    let w = d1[1] - e1.scale(proj);
    let len_w = w.norm();
    let e2 = w.scale(1.0 / len_w);
    Ok(Frame {
        e: [e1, e2],
        coeffs: [[1.0 / len_u, 0.0], [-proj / (len_u * len_w), 1.0 / len_w]],
        metric,
        det,
    })
}

fn normal_part(w: &Vec4, e: &[Vec4; 2]) -> Vec4 {
    *w - e[0].scale(w.dot(&e[0])) - e[1].scale(w.dot(&e[1]))
}

fn assemble_frame(u: f64, v: f64, d: &Derivatives, fr: &Frame) -> (PointFrame, [[Vec4; 2]; 2]) {
    let e = fr.e;
    let n = [e[0].j(), e[1].j()];
    let second: [[Vec4; 2]; 2] =
        std::array::from_fn(|a| std::array::from_fn(|b| normal_part(&d.d2[a][b], &e)));
    let f = fr.coeffs;
    let mut h = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut hv = Vec4::ZERO;
            for a in 0..2 {
                for b in 0..2 {
                    hv = hv + second[a][b].scale(f[i][a] * f[j][b]);
                }
            }
            for k in 0..2 {
                h[i][j][k] = hv.dot(&n[k]);
            }
        }
    }
    let mean = [h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
    let h2 = mean[0] * mean[0] + mean[1] * mean[1];
    let a2: f64 = h.iter().flatten().flatten().map(|c| c * c).sum();
    let x_tan = e[0].scale(d.x.dot(&e[0])) + e[1].scale(d.x.dot(&e[1]));
    let frame = PointFrame {
        u,
        v,
        x: d.x,
        e,
        n,
        metric: fr.metric,
        h,
        mean,
        h2,
        a2,
        gauss_k: 0.5 * (h2 - a2),
        x_tan,
        x_nor: d.x - x_tan,
        area_density: fr.det.sqrt(),
        frame_coeffs: f,
    };
    (frame, second)
}

/// Adapted frame and curvature quantities at `(u, v)`.
pub fn frame_at(chart: &SurfaceChart, u: f64, v: f64) -> Result<PointFrame> {
    let d = Derivatives::at(chart, u, v);
    let fr = build_frame(&d.d1, u, v)?;
    Ok(assemble_frame(u, v, &d, &fr).0)
}

/// Frame and `∇A` from a single jet evaluation.
///
/// `(∇_c h)_{ab}` is evaluated in coordinates as
/// `(x_abc)^⊥ - Γ^e_ab h_ec - Γ^d_ca h_db - Γ^d_cb h_ad`, where the first term is the normal
/// connection applied to `h_ab` (the normal projection of the ambient derivative), and is
/// then contracted with the orthonormal frame.
pub fn local_data(chart: &SurfaceChart, u: f64, v: f64) -> Result<(PointFrame, GradA)> {
    let d = Derivatives::at(chart, u, v);
    let fr = build_frame(&d.d1, u, v)?;
    let (frame, second) = assemble_frame(u, v, &d, &fr);

    let g = fr.metric;
    let inv = [
        [g[1][1] / fr.det, -g[0][1] / fr.det],
        [-g[1][0] / fr.det, g[0][0] / fr.det],
    ];
    // christoffel[e][a][b] = Γ^e_ab
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let lowered = [d.d2[a][b].dot(&d.d1[0]), d.d2[a][b].dot(&d.d1[1])];
            for e in 0..2 {
                christoffel[e][a][b] = inv[e][0] * lowered[0] + inv[e][1] * lowered[1];
            }
        }
    }
    let e = frame.e;
    let mut nabla = [[[Vec4::ZERO; 2]; 2]; 2]; // nabla[c][a][b]
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut t = normal_part(&d.d3[a][b][c], &e);
                for m in 0..2 {
                    t = t
                        - second[m][c].scale(christoffel[m][a][b])
                        - second[m][b].scale(christoffel[m][c][a])
                        - second[a][m].scale(christoffel[m][c][b]);
                }
                nabla[c][a][b] = t;
            }
        }
    }
    let f = fr.coeffs;
    let mut comps = [[[[0.0; 2]; 2]; 2]; 2];
    let mut norm_sq = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let mut vec = Vec4::ZERO;
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            vec = vec + nabla[c][a][b].scale(f[i][a] * f[j][b] * f[l][c]);
                        }
                    }
                }
                for k in 0..2 {
                    let val = vec.dot(&frame.n[k]);
                    comps[i][j][l][k] = val;
                    norm_sq += val * val;
                }
            }
        }
    }
    Ok((frame, GradA { c: comps, norm_sq }))
}

/// `h_{ij,l}^{k*}` and `|∇A|²` at `(u, v)`.
pub fn grad_a(chart: &SurfaceChart, u: f64, v: f64) -> Result<GradA> {
    local_data(chart, u, v).map(|(_, g)| g)
}

/// `|⟨J x_u, x_v⟩| / (|x_u| |x_v|)`, zero exactly when the tangent plane is Lagrangian.
pub fn lagrangian_defect(chart: &SurfaceChart, u: f64, v: f64) -> f64 {
    let jets = chart.jet(u, v, 1);
    let xu = Vec4(jets.map(|j| j.derivative(1, 0)));
    let xv = Vec4(jets.map(|j| j.derivative(0, 1)));
    xu.kahler(&xv).abs() / (xu.norm() * xv.norm())
}

/// `|H + x^⊥|`, computed in the adapted frame as `sqrt(Σ_k (H^{k*} + ⟨x, n_k⟩)²)`.
pub fn shrinker_residual(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    let frame = frame_at(chart, u, v)?;
    let [a, b] = frame.shrinker_defects();
    Ok(a.hypot(b))
}

/// `max_{i,k} |H^{k*}_{,i} - Σ_j h_{ij}^{k*} ⟨x, e_j⟩|`, which vanishes on self-shrinkers.
pub fn mean_curvature_derivative_defect(frame: &PointFrame, grad: &GradA) -> f64 {
    let dh = grad.mean_derivative();
    let xe = [frame.x.dot(&frame.e[0]), frame.x.dot(&frame.e[1])];
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for k in 0..2 {
            let rhs = frame.h[i][0][k] * xe[0] + frame.h[i][1][k] * xe[1];
            worst = worst.max((dh[i][k] - rhs).abs());
        }
    }
    worst
}

/// Gauss curvature from the metric alone (Brioschi's formula), independent of the normal
/// bundle.
pub fn intrinsic_gauss_curvature(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    let jets = chart.jet(u, v, 3);
    let xu = jets.map(|j| j.partial_u());
    let xv = jets.map(|j| j.partial_v());
    let dot = |a: &[crate::tensor::Jet2; 4], b: &[crate::tensor::Jet2; 4]| {
        (a[0] * b[0] + a[1] * b[1]) + (a[2] * b[2] + a[3] * b[3])
    };
    let ee = dot(&xu, &xu);
    let ff = dot(&xu, &xv);
    let gg = dot(&xv, &xv);
    let (e, f, g) = (ee.value(), ff.value(), gg.value());
    let det = e * g - f * f;
    if !(det > DEGENERATE_METRIC_THRESHOLD) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    let (e_u, e_v, e_vv) = (
        ee.derivative(1, 0),
        ee.derivative(0, 1),
        ee.derivative(0, 2),
    );
    let (f_u, f_v, f_uv) = (
        ff.derivative(1, 0),
        ff.derivative(0, 1),
        ff.derivative(1, 1),
    );
    let (g_u, g_v, g_uu) = (
        gg.derivative(1, 0),
        gg.derivative(0, 1),
        gg.derivative(2, 0),
    );
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let first = det3([
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, e, f],
        [0.5 * g_v, f, g],
    ]);
    let second = det3([
        [0.0, 0.5 * e_v, 0.5 * g_u],
        [0.5 * e_v, e, f],
        [0.5 * g_u, f, g],
    ]);
    Ok((first - second) / (det * det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Jet2;

    fn clifford() -> SurfaceChart {
        SurfaceChart::new("clifford", [2.0 * std::f64::consts::PI; 2], |s, t| {
            [s.cos(), s.sin(), t.cos(), t.sin()]
        })
    }

    #[test]
    fn clifford_frame_components() {
        let c = clifford();
        for (u, v) in [(0.0, 0.0), (0.4, 2.2), (5.0, 1.0)] {
            let f = frame_at(&c, u, v).unwrap();
            assert!((f.a2 - 2.0).abs() < 1e-12);
            assert!((f.h2 - 2.0).abs() < 1e-12);
            assert!(f.gauss_k.abs() < 1e-12);
            assert!((f.h[0][0][0] - 1.0).abs() < 1e-12);
            assert!((f.h[1][1][1] - 1.0).abs() < 1e-12);
            for (i, j, k) in [(0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 0)] {
                assert!(f.h[i][j][k].abs() < 1e-12);
            }
            let [a, b] = f.shrinker_defects();
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
    }

    #[test]
    fn flat_plane_is_totally_geodesic() {
        let plane = SurfaceChart::new("plane", [1.0, 1.0], |u, v| {
            [u, v, Jet2::zero(u.order()), Jet2::zero(u.order())]
        });
        let (f, g) = local_data(&plane, 0.3, -0.2).unwrap();
        assert_eq!(f.a2, 0.0);
        assert_eq!(f.h2, 0.0);
        assert_eq!(f.gauss_k, 0.0);
        assert_eq!(g.norm_sq, 0.0);
    }

    #[test]
    fn graph_defect_is_one_over_root_two() {
        let graph = SurfaceChart::new("graph", [1.0, 1.0], |u, v| [u, v, u, Jet2::zero(u.order())]);
        let d = lagrangian_defect(&graph, 0.1, 0.2);
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_metric_reports_coordinates() {
        let cone = SurfaceChart::new("collapsed", [1.0, 1.0], |u, v| {
            [u * v, v, Jet2::zero(u.order()), Jet2::zero(u.order())]
        });
        match frame_at(&cone, 0.5, 0.0) {
            Err(Error::DegenerateMetric { u, v, .. }) => assert_eq!((u, v), (0.5, 0.0)),
            other => panic!("expected degenerate metric, got {other:?}"),
        }
    }

    #[test]
    fn clifford_has_parallel_second_fundamental_form() {
        let g = grad_a(&clifford(), 1.3, 0.2).unwrap();
        assert!(g.norm_sq <= 1e-10);
    }

    #[test]
    fn brioschi_on_round_sphere_patch() {
        // unit sphere in the first three coordinates, K = 1
        let sphere = SurfaceChart::new("sphere", [1.0, 1.0], |u, v| {
            [
                u.cos() * v.cos(),
                u.cos() * v.sin(),
                u.sin(),
                Jet2::zero(u.order()),
            ]
        });
        let k = intrinsic_gauss_curvature(&sphere, 0.4, 1.1).unwrap();
        assert!((k - 1.0).abs() < 1e-12, "{k}");
    }
}

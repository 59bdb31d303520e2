//! Second-order periodic stencils and quadrature.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{Field, Field2D, PeriodicGrid1D};
use crate::AmbientVector;

/// Central difference `(f[i+1] - f[i-1]) / 2h`.
pub fn diff1<const K: usize>(f: &Field<K>) -> Field<K> {
    let n = f.len();
    let inv = 0.5 / f.grid().spacing();
    let v = f.values();
    let out = (0..n).map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]) * inv).collect();
    Field::new(*f.grid(), out).expect("same grid")
}

/// Forward difference `(f[i+1] - f[i]) / h`, living on the half nodes.
pub fn forward_diff<const K: usize>(f: &Field<K>) -> Field<K> {
    let n = f.len();
    let inv = f.grid().spacing().recip();
    let v = f.values();
    let out = (0..n).map(|i| (v[(i + 1) % n] - v[i]) * inv).collect();
    Field::new(*f.grid(), out).expect("same grid")
}

/// Three-point Laplacian `(f[i+1] - 2 f[i] + f[i-1]) / h^2`.
pub fn laplacian<const K: usize>(f: &Field<K>) -> Field<K> {
    let mut out = Field::zeros(*f.grid());
    laplacian_into(f.values(), f.grid().spacing(), out.values_mut());
    out
}

pub(crate) fn laplacian_into<const K: usize>(v: &[AmbientVector<K>], h: f64, out: &mut [AmbientVector<K>]) {
    let n = v.len();
    let inv = h.powi(-2);
    for i in 0..n {
        let l = v[(i + n - 1) % n];
        let r = v[(i + 1) % n];
        out[i] = (l + r - v[i] * 2.0) * inv;
    }
}

/// `h Σ f_i`, the rectangle rule (spectrally accurate on periodic grids).
pub fn integrate(grid: &PeriodicGrid1D, f: &[f64]) -> f64 {
    grid.spacing() * f.iter().sum::<f64>()
}

pub fn l2_norm<const K: usize>(f: &Field<K>) -> f64 {
    let sq: Vec<f64> = f.values().iter().map(|v| v.norm_sq()).collect();
    integrate(f.grid(), &sq).sqrt()
}

pub fn linf_norm<const K: usize>(f: &Field<K>) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// `½ ∫ |∂_x u|^2` with the derivative taken on half nodes. This is the
/// energy whose negative gradient is [`laplacian`], so it is the Dirichlet
/// energy the semi-discrete flows conserve or dissipate.
pub fn dirichlet_energy<const K: usize>(u: &Field<K>) -> f64 {
    let d = forward_diff(u);
    0.5 * l2_norm(&d).powi(2)
}

/// Central difference along `x` (rows).
pub fn diff_x<const K: usize>(f: &Field2D<K>) -> Field2D<K> {
    let g = *f.grid();
    let (nx, ny) = (g.x.n(), g.y.n());
    let inv = 0.5 / g.x.spacing();
    let mut out = Vec::with_capacity(g.len());
    for ix in 0..nx {
        for iy in 0..ny {
            out.push((*f.at((ix + 1) % nx, iy) - *f.at((ix + nx - 1) % nx, iy)) * inv);
        }
    }
    Field2D::new(g, out).expect("same grid")
}

/// Central difference along `y` (columns).
pub fn diff_y<const K: usize>(f: &Field2D<K>) -> Field2D<K> {
    let g = *f.grid();
    let (nx, ny) = (g.x.n(), g.y.n());
    let inv = 0.5 / g.y.spacing();
    let mut out = Vec::with_capacity(g.len());
    for ix in 0..nx {
        for iy in 0..ny {
            out.push((*f.at(ix, (iy + 1) % ny) - *f.at(ix, (iy + ny - 1) % ny)) * inv);
        }
    }
    Field2D::new(g, out).expect("same grid")
}

/// Second differences along each axis, returned separately as `(f_xx, f_yy)`.
pub(crate) fn second_differences<const K: usize>(f: &Field2D<K>) -> (Field2D<K>, Field2D<K>) {
    let g = *f.grid();
    let (nx, ny) = (g.x.n(), g.y.n());
    let (ix2, iy2) = (g.x.spacing().powi(-2), g.y.spacing().powi(-2));
    let mut fxx = Vec::with_capacity(g.len());
    let mut fyy = Vec::with_capacity(g.len());
    for ix in 0..nx {
        for iy in 0..ny {
            let c = *f.at(ix, iy) * 2.0;
            fxx.push((*f.at((ix + 1) % nx, iy) + *f.at((ix + nx - 1) % nx, iy) - c) * ix2);
            fyy.push((*f.at(ix, (iy + 1) % ny) + *f.at(ix, (iy + ny - 1) % ny) - c) * iy2);
        }
    }
    (Field2D::new(g, fxx).expect("same grid"), Field2D::new(g, fyy).expect("same grid"))
}

/// Five-point Laplacian.
pub fn laplacian_2d<const K: usize>(f: &Field2D<K>) -> Field2D<K> {
    let (fxx, fyy) = second_differences(f);
    let values = fxx.values().iter().zip(fyy.values()).map(|(a, b)| *a + *b).collect();
    Field2D::new(*f.grid(), values).expect("same grid")
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{PI, TAU};

    use proptest::prelude::*;

    use super::*;
    use crate::grid::PeriodicGrid2D;
    use crate::Vec3;

    type S = AmbientVector<1>;

    fn scalar(g: PeriodicGrid1D, f: impl Fn(f64) -> f64) -> Field<1> {
        Field::from_fn(g, |x| S::new([f(x)]))
    }

    fn c_of(h: f64) -> f64 {
        (2.0 - 2.0 * h.cos()) / (h * h)
    }

    #[test]
    fn derivatives_annihilate_constants() {
        let g = PeriodicGrid1D::circle(16).unwrap();
        let f = Field::from_fn(g, |_| Vec3::new([1.5, -2.0, 0.25]));
        assert!(diff1(&f).values().iter().all(|v| *v == Vec3::zero()));
        assert!(laplacian(&f).values().iter().all(|v| *v == Vec3::zero()));
    }

    // Oracle: sin(x+h) - sin(x-h) = 2 cos x sin h, and |cos x - cos x sin(h)/h| ≤ h²/6.
    #[test]
    fn diff1_of_sine() {
        let g = PeriodicGrid1D::circle(64).unwrap();
        let h = g.spacing();
        let d = diff1(&scalar(g, f64::sin));
        for (x, v) in g.nodes().zip(d.values()) {
            assert!((v[0] - x.cos() * h.sin() / h).abs() < 1e-14);
            assert!((v[0] - x.cos()).abs() <= h * h / 6.0);
        }
        let circle = Field::from_fn(g, |x| Vec3::new([x.cos(), x.sin(), 0.0]));
        let d = diff1(&circle);
        for (x, v) in g.nodes().zip(d.values()) {
            let expect = Vec3::new([-x.sin(), x.cos(), 0.0]) * (h.sin() / h);
            assert!((*v - expect).max_abs() < 1e-14);
        }
    }

    // Oracle: cos is a discrete eigenfunction, Δ_h cos = -c(h) cos.
    #[test]
    fn laplacian_of_cosine() {
        let g = PeriodicGrid1D::circle(128).unwrap();
        let c = c_of(g.spacing());
        let l = laplacian(&scalar(g, f64::cos));
        for (x, v) in g.nodes().zip(l.values()) {
            assert!((v[0] + c * x.cos()).abs() < 1e-11);
        }
        let g2 = PeriodicGrid2D::new(32, 48, TAU, TAU).unwrap();
        let f = Field2D::from_fn(g2, |x, y| S::new([x.cos() * y.cos()]));
        let l = laplacian_2d(&f);
        let c2 = c_of(g2.x.spacing()) + c_of(g2.y.spacing());
        for (a, b) in f.values().iter().zip(l.values()) {
            assert!((b[0] + c2 * a[0]).abs() < 1e-11);
        }
    }

    #[test]
    fn quadrature_examples() {
        let g = PeriodicGrid1D::circle(64).unwrap();
        let ones = alloc::vec![1.0; 64];
        assert!((integrate(&g, &ones) - TAU).abs() < 1e-14);
        let c: Vec<f64> = g.nodes().map(f64::cos).collect();
        assert!(integrate(&g, &c).abs() < 1e-13);
        let c2: Vec<f64> = g.nodes().map(|x| x.cos().powi(2)).collect();
        assert!((integrate(&g, &c2) - PI).abs() < 1e-13);
    }

    #[test]
    fn staggered_composition_is_the_three_point_stencil() {
        let g = PeriodicGrid1D::circle(64).unwrap();
        let f = scalar(g, |x| (x.sin() + 0.3 * (2.0 * x).cos()).exp());
        let fwd = forward_diff(&f);
        // backward difference of the forward difference
        let back = fwd.zip_map(&fwd.roll(g.n() - 1), |a, b| (*a - *b) * g.spacing().recip()).unwrap();
        let lap = laplacian(&f);
        for (a, b) in back.values().iter().zip(lap.values()) {
            assert!((a[0] - b[0]).abs() < 1e-10);
        }
        // the wide stencil diff1∘diff1 agrees to O(h²)
        let wide = diff1(&diff1(&f));
        let err = wide.values().iter().zip(lap.values()).fold(0.0f64, |m, (a, b)| m.max((a[0] - b[0]).abs()));
        let h = g.spacing();
        assert!(err < 20.0 * h * h, "{err}");
    }

    #[test]
    fn dirichlet_energy_of_unit_circle() {
        let g = PeriodicGrid1D::circle(256).unwrap();
        let u = Field::from_fn(g, |x| Vec3::new([x.cos(), x.sin(), 0.0]));
        let h = g.spacing();
        let sinc = (h / 2.0).sin() / (h / 2.0);
        assert!((dirichlet_energy(&u) - PI * sinc * sinc).abs() < 1e-12);
        assert!((dirichlet_energy(&u) - PI).abs() < h * h);
    }

    fn field(n: usize) -> impl Strategy<Value = Field<3>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
            let g = PeriodicGrid1D::circle(n).unwrap();
            Field::new(g, v.into_iter().map(|(a, b, c)| Vec3::new([a, b, c])).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn summation_by_parts(f in field(24), g in field(24)) {
            let df = diff1(&f);
            let dg = diff1(&g);
            let grid = *f.grid();
            let lhs: Vec<f64> = df.values().iter().zip(g.values()).map(|(a, b)| a.dot(b)).collect();
            let rhs: Vec<f64> = f.values().iter().zip(dg.values()).map(|(a, b)| a.dot(b)).collect();
            prop_assert!((integrate(&grid, &lhs) + integrate(&grid, &rhs)).abs() < 1e-12);
        }

        #[test]
        fn stencils_commute_with_shifts(f in field(16), k in 0usize..16) {
            prop_assert_eq!(diff1(&f.roll(k)), diff1(&f).roll(k));
            prop_assert_eq!(laplacian(&f.roll(k)), laplacian(&f).roll(k));
        }
    }
}

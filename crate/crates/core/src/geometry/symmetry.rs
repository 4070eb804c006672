use super::{coframe, FrameVector, KerrParams, Local, Mat4, SpacetimePoint};
use crate::scalar::Real;

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn eta<T: Real>(a: usize) -> T {
    T::lit(ETA[a])
}

/// Killing–Yano two-form, covariant frame components:
/// `f = -a cos(theta) w0^w1 + r w2^w3`.
pub fn killing_yano<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    let l = Local::at(params, point);
    two_form(-l.a * l.cos, l.r)
}

/// Hodge dual of the Killing–Yano form: `h = r w0^w1 + a cos(theta) w2^w3`.
pub fn hodge_dual<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    let l = Local::at(params, point);
    two_form(l.r, l.a * l.cos)
}

fn two_form<T: Real>(f01: T, f23: T) -> Mat4<T> {
    let z = T::zero();
    [[z, f01, z, z], [-f01, z, z, z], [z, z, z, f23], [z, z, -f23, z]]
}

/// Killing tensor `K_ab = f_ac eta^cd f_db` in covariant frame components.
pub fn killing_tensor_frame<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    let f = killing_yano(params, point);
    let mut k = [[T::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            k[a][b] = (0..4).fold(T::zero(), |s, c| s + f[a][c] * eta::<T>(c) * f[c][b]);
        }
    }
    k
}

/// Killing tensor in covariant coordinate components `K_ij`.
pub fn killing_tensor<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> Mat4<T> {
    let k = killing_tensor_frame(params, point);
    let mut out = frame_to_coord_two_form(params, point, &k);
    // Pull-back of a symmetric tensor; restore exact symmetry after roundoff.
    for i in 0..4 {
        for j in (i + 1)..4 {
            let m = (out[i][j] + out[j][i]) * T::lit(0.5);
            out[i][j] = m;
            out[j][i] = m;
        }
    }
    out
}

/// Converts covariant frame components `t_ab` of a rank-2 tensor to
/// coordinate components `t_ij = w^a_i w^b_j t_ab`.
pub fn frame_to_coord_two_form<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>, t: &Mat4<T>) -> Mat4<T> {
    let w = coframe(params, point);
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = T::zero();
            for a in 0..4 {
                for b in 0..4 {
                    s = s + w[a][i] * w[b][j] * t[a][b];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Carter constant `K_ab k^a k^b` of a vector given by contravariant frame
/// components.
pub fn carter_constant<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>, k: &FrameVector<T>) -> T {
    let kt = killing_tensor_frame(params, point);
    let mut s = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            s = s + kt[a][b] * k.0[a] * k.0[b];
        }
    }
    s
}

/// Frame components of the stationary Killing vector `d/dt`.
pub fn time_killing_vector<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> FrameVector<T> {
    let l = Local::at(params, point);
    let rs = l.sigma.sqrt();
    FrameVector([l.delta.sqrt() / rs, T::zero(), l.a * l.sin / rs, T::zero()])
}

/// Frame components of the axial Killing vector `d/dphi`.
pub fn axial_killing_vector<T: Real>(params: &KerrParams<T>, point: &SpacetimePoint<T>) -> FrameVector<T> {
    let l = Local::at(params, point);
    let rs = l.sigma.sqrt();
    FrameVector([
        -l.delta.sqrt() * l.a * l.sin * l.sin / rs,
        T::zero(),
        -l.sin * l.rho2 / rs,
        T::zero(),
    ])
}

//! The four training objectives and their gradients.
//!
//! Every cosine and KL denominator carries an additive `EPS` guard so
//! zero-norm rows (common right after initialization) stay finite.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

pub const EPS: f64 = 1e-8;

fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// `v / ‖v‖`, or zero for the zero vector.
fn direction(v: ArrayView1<f64>, n: f64) -> Array1<f64> {
    if n > 0.0 {
        &v / n
    } else {
        Array1::zeros(v.len())
    }
}

/// Cross-correlation `K` between unit-normalized code columns.
pub fn correlation_matrix(h_e: ArrayView2<f64>, h_o: ArrayView2<f64>) -> Array2<f64> {
    let ne = h_e.map_axis(Axis(0), norm);
    let no = h_o.map_axis(Axis(0), norm);
    let dots = h_e.t().dot(&h_o);
    Array2::from_shape_fn(dots.dim(), |(i, j)| dots[[i, j]] / (ne[i] * no[j] + EPS))
}

fn cr_weights(m: usize) -> (f64, f64) {
    let mf = m as f64;
    let off = if m > 1 { 1.0 / (mf * mf - mf) } else { 0.0 };
    (1.0 / (mf * mf), off)
}

/// Redundancy reduction between the two code spaces: diagonal of `K`
/// pulled to one, off-diagonal pushed to zero.
pub fn correlation_reduction_loss(h_e: ArrayView2<f64>, h_o: ArrayView2<f64>) -> f64 {
    let k = correlation_matrix(h_e, h_o);
    let (wd, wo) = cr_weights(k.nrows());
    k.indexed_iter()
        .map(|((i, j), v)| if i == j { wd * (v - 1.0).powi(2) } else { wo * v * v })
        .sum()
}

/// Value and gradients with respect to `h_e` and `h_o`.
pub fn correlation_reduction_grad(
    h_e: ArrayView2<f64>,
    h_o: ArrayView2<f64>,
) -> (f64, Array2<f64>, Array2<f64>) {
    let m = h_e.ncols();
    let ne = h_e.map_axis(Axis(0), norm);
    let no = h_o.map_axis(Axis(0), norm);
    let dots = h_e.t().dot(&h_o);
    let (wd, wo) = cr_weights(m);
    let mut loss = 0.0;
    let mut d_dots = Array2::zeros((m, m));
    let mut d_ne = Array1::zeros(m);
    let mut d_no = Array1::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let denom = ne[i] * no[j] + EPS;
            let k = dots[[i, j]] / denom;
            let g = if i == j {
                loss += wd * (k - 1.0).powi(2);
                2.0 * wd * (k - 1.0)
            } else {
                loss += wo * k * k;
                2.0 * wo * k
            };
            d_dots[[i, j]] = g / denom;
            let d_denom = -g * k / denom;
            d_ne[i] += d_denom * no[j];
            d_no[j] += d_denom * ne[i];
        }
    }
    let mut d_he = h_o.dot(&d_dots.t());
    let mut d_ho = h_e.dot(&d_dots);
    for i in 0..m {
        d_he.column_mut(i).scaled_add(d_ne[i], &direction(h_e.column(i), ne[i]));
        d_ho.column_mut(i).scaled_add(d_no[i], &direction(h_o.column(i), no[i]));
    }
    (loss, d_he, d_ho)
}

/// Scaled cosine error `Σᵢ (1 − cos(targetᵢ, decodedᵢ))^β`.
pub fn reconstruction_loss(target: ArrayView2<f64>, decoded: ArrayView2<f64>, beta: f64) -> f64 {
    target
        .rows()
        .into_iter()
        .zip(decoded.rows())
        .map(|(t, z)| {
            let c = t.dot(&z) / (norm(t) * norm(z) + EPS);
            (1.0 - c).max(0.0).powf(beta)
        })
        .sum()
}

/// Value and gradients with respect to `target` and `decoded`.
pub fn reconstruction_grad(
    target: ArrayView2<f64>,
    decoded: ArrayView2<f64>,
    beta: f64,
) -> (f64, Array2<f64>, Array2<f64>) {
    let mut loss = 0.0;
    let mut d_t = Array2::zeros(target.dim());
    let mut d_z = Array2::zeros(decoded.dim());
    for (i, (t, z)) in target.rows().into_iter().zip(decoded.rows()).enumerate() {
        let (nt, nz) = (norm(t), norm(z));
        let denom = nt * nz + EPS;
        let c = t.dot(&z) / denom;
        let r = (1.0 - c).max(0.0);
        loss += r.powf(beta);
        let d_c = -beta * r.powf(beta - 1.0);
        // ∂c/∂z = t/N − c·‖t‖·ẑ/N, symmetric for t
        let gz = (&t / denom) - &(direction(z, nz) * (c * nt / denom));
        let gt = (&z / denom) - &(direction(t, nt) * (c * nz / denom));
        d_z.row_mut(i).assign(&(gz * d_c));
        d_t.row_mut(i).assign(&(gt * d_c));
    }
    (loss, d_t, d_z)
}

pub fn softmax_rows(x: ArrayView2<f64>) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row /= s;
    }
    out
}

/// Smoothed KL divergence `KL(p ‖ q)` with each distribution floored by
/// `EPS` and renormalized, clamped at zero against round-off.
pub fn kl_divergence(p: ArrayView1<f64>, q: ArrayView1<f64>) -> f64 {
    kl_divergence_grad(p, q).0
}

/// Value and gradients with respect to the unsmoothed `p` and `q`.
pub fn kl_divergence_grad(p: ArrayView1<f64>, q: ArrayView1<f64>) -> (f64, Array1<f64>, Array1<f64>) {
    let sp = p.sum() + EPS * p.len() as f64;
    let sq = q.sum() + EPS * q.len() as f64;
    let pt = p.mapv(|v| (v + EPS) / sp);
    let qt = q.mapv(|v| (v + EPS) / sq);
    let kl: f64 = pt.iter().zip(qt.iter()).map(|(a, b)| a * (a / b).ln()).sum();
    if kl <= 0.0 {
        return (0.0, Array1::zeros(p.len()), Array1::zeros(q.len()));
    }
    let g_pt: Array1<f64> = pt.iter().zip(qt.iter()).map(|(a, b)| (a / b).ln() + 1.0).collect();
    let g_qt: Array1<f64> = pt.iter().zip(qt.iter()).map(|(a, b)| -a / b).collect();
    // through v ↦ (v + ε)/Σ(v + ε)
    let g_p = (&g_pt - g_pt.dot(&pt)) / sp;
    let g_q = (&g_qt - g_qt.dot(&qt)) / sq;
    (kl, g_p, g_q)
}

/// Mean row-softmax distribution of a code matrix.
pub fn mean_distribution(h: ArrayView2<f64>) -> Array1<f64> {
    softmax_rows(h).mean_axis(Axis(0)).expect("non-empty code matrix")
}

/// `KL(mean softmax(source) ‖ mean softmax(target))` and its gradients.
pub fn code_kl_grad(source: ArrayView2<f64>, target: ArrayView2<f64>) -> (f64, Array2<f64>, Array2<f64>) {
    let s_soft = softmax_rows(source);
    let t_soft = softmax_rows(target);
    let p = s_soft.mean_axis(Axis(0)).expect("non-empty source codes");
    let q = t_soft.mean_axis(Axis(0)).expect("non-empty target codes");
    let (kl, g_p, g_q) = kl_divergence_grad(p.view(), q.view());
    let back = |soft: &Array2<f64>, g: &Array1<f64>| {
        let g = g / soft.nrows() as f64;
        let mut out = Array2::zeros(soft.dim());
        for (mut o, s) in out.rows_mut().into_iter().zip(soft.rows()) {
            let inner = s.dot(&g);
            o.assign(&(&s * &(&g - inner)));
        }
        out
    };
    (kl, back(&s_soft, &g_p), back(&t_soft, &g_q))
}

/// `KL(Z_E^S ‖ Z_E^T) + KL(Z_O^S ‖ Z_O^T)` over mean row-softmax distributions.
pub fn alignment_loss(
    h_e_src: ArrayView2<f64>,
    h_e_tgt: ArrayView2<f64>,
    h_o_src: ArrayView2<f64>,
    h_o_tgt: ArrayView2<f64>,
) -> f64 {
    code_kl_grad(h_e_src, h_e_tgt).0 + code_kl_grad(h_o_src, h_o_tgt).0
}

/// Mean cross-entropy of row-softmax logits against class ids.
pub fn cross_entropy(logits: ArrayView2<f64>, labels: &[usize]) -> f64 {
    cross_entropy_grad(logits, labels).0
}

pub fn cross_entropy_grad(logits: ArrayView2<f64>, labels: &[usize]) -> (f64, Array2<f64>) {
    let n = logits.nrows() as f64;
    let mut grad = softmax_rows(logits);
    let mut loss = 0.0;
    for (i, (row, &y)) in logits.rows().into_iter().zip(labels).enumerate() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lse = max + row.mapv(|v| (v - max).exp()).sum().ln();
        loss += lse - row[y];
        grad[[i, y]] -= 1.0;
    }
    (loss / n, grad / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn correlation_reduction_identity_is_zero() {
        let h = Array2::<f64>::eye(4);
        assert!(correlation_reduction_loss(h.view(), h.view()) < 1e-14);
    }

    #[test]
    fn correlation_reduction_constant_is_one() {
        let h = Array2::from_elem((5, 4), 0.7);
        assert!((correlation_reduction_loss(h.view(), h.view()) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn correlation_reduction_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (he, ho) = (random(&mut rng, 7, 3), random(&mut rng, 7, 3));
        let d = 3.0;
        let mut want = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let (mut dot, mut a, mut b) = (0.0, 0.0, 0.0);
                for r in 0..7 {
                    dot += he[[r, i]] * ho[[r, j]];
                    a += he[[r, i]] * he[[r, i]];
                    b += ho[[r, j]] * ho[[r, j]];
                }
                let k = dot / (a.sqrt() * b.sqrt() + 1e-8);
                want += if i == j { (k - 1.0) * (k - 1.0) / (d * d) } else { k * k / (d * d - d) };
            }
        }
        assert!((correlation_reduction_loss(he.view(), ho.view()) - want).abs() < 1e-9);
    }

    #[test]
    fn reconstruction_examples() {
        let t = array![[1.0, 2.0, -1.0, 0.5], [0.3, -0.2, 0.0, 1.0]];
        assert!(reconstruction_loss(t.view(), t.view(), 2.0) < 1e-14);
        let neg = -&t;
        assert!((reconstruction_loss(t.view(), neg.view(), 1.0) - 4.0).abs() < 1e-7);
        assert!((reconstruction_loss(t.view(), neg.view(), 2.0) - 8.0).abs() < 1e-7);
    }

    #[test]
    fn reconstruction_ignores_positive_row_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (t, z) = (random(&mut rng, 6, 4), random(&mut rng, 6, 4));
        let mut scaled = z.clone();
        for (i, mut row) in scaled.rows_mut().into_iter().enumerate() {
            row *= 0.5 + i as f64;
        }
        let a = reconstruction_loss(t.view(), z.view(), 2.0);
        let b = reconstruction_loss(t.view(), scaled.view(), 2.0);
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn kl_closed_form() {
        let kl = kl_divergence(array![0.9, 0.1].view(), array![0.5, 0.5].view());
        let want = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert!((kl - want).abs() < 1e-7);
        assert!((kl - 0.3681).abs() < 1e-4);
    }

    #[test]
    fn alignment_zero_for_equal_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = random(&mut rng, 9, 5);
        assert_eq!(alignment_loss(h.view(), h.view(), h.view(), h.view()), 0.0);
        // different row counts, both uniform
        let a = Array2::zeros((3, 4));
        let b = Array2::from_elem((7, 4), 2.0);
        assert_eq!(alignment_loss(a.view(), b.view(), a.view(), b.view()), 0.0);
    }

    #[test]
    fn cross_entropy_examples() {
        let uniform = Array2::zeros((4, 3));
        assert!((cross_entropy(uniform.view(), &[0, 1, 2, 0]) - 3f64.ln()).abs() < 1e-12);
        let sharp = array![[100.0, 0.0], [0.0, 100.0]];
        assert!(cross_entropy(sharp.view(), &[0, 1]) < 1e-40);
    }

    #[test]
    fn cross_entropy_matches_per_sample_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let logits = random(&mut rng, 5, 3) * 3.0;
        let labels = [2, 0, 1, 1, 0];
        let mut want = 0.0;
        for i in 0..5 {
            let z: f64 = (0..3).map(|c| logits[[i, c]].exp()).sum();
            want -= (logits[[i, labels[i]]].exp() / z).ln();
        }
        assert!((cross_entropy(logits.view(), &labels) - want / 5.0).abs() < 1e-9);
    }

    fn check_grad(f: impl Fn(&Array2<f64>) -> f64, x: &Array2<f64>, g: &Array2<f64>) {
        let h = 1e-6;
        for idx in 0..x.len() {
            let (r, c) = (idx / x.ncols(), idx % x.ncols());
            let mut xp = x.clone();
            xp[[r, c]] += h;
            let mut xm = x.clone();
            xm[[r, c]] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            let an = g[[r, c]];
            assert!((fd - an).abs() <= 1e-5 * fd.abs().max(an.abs()) + 1e-8, "fd {fd} vs {an} at {r},{c}");
        }
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let (a, b) = (random(&mut rng, 6, 4), random(&mut rng, 6, 4));
        let (_, da, db) = correlation_reduction_grad(a.view(), b.view());
        check_grad(|x| correlation_reduction_loss(x.view(), b.view()), &a, &da);
        check_grad(|x| correlation_reduction_loss(a.view(), x.view()), &b, &db);

        let (_, dt, dz) = reconstruction_grad(a.view(), b.view(), 2.0);
        check_grad(|x| reconstruction_loss(x.view(), b.view(), 2.0), &a, &dt);
        check_grad(|x| reconstruction_loss(a.view(), x.view(), 2.0), &b, &dz);

        let c = random(&mut rng, 3, 4) * 2.0;
        let (_, ds, dtg) = code_kl_grad(a.view(), c.view());
        check_grad(|x| code_kl_grad(x.view(), c.view()).0, &a, &ds);
        check_grad(|x| code_kl_grad(a.view(), x.view()).0, &c, &dtg);

        let labels = [0, 3, 1, 2, 2, 0];
        let (_, dl) = cross_entropy_grad(a.view(), &labels);
        check_grad(|x| cross_entropy(x.view(), &labels), &a, &dl);
    }
}

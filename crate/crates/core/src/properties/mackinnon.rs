//! MacKinnon (1994) asymptotic p-values of the constant-only Dickey-Fuller
//! t statistic, tabulated every 0.05 and interpolated linearly in log p.

/// `(tau, p)` pairs in increasing `tau`.
pub(super) const TAU_P: [(f64, f64); 196] = [
    (-7.00, 7.363799e-10),
    (-6.95, 9.747989e-10),
    (-6.90, 1.289330e-09),
    (-6.85, 1.703876e-09),
    (-6.80, 2.249708e-09),
    (-6.75, 2.967683e-09),
    (-6.70, 3.911123e-09),
    (-6.65, 5.149521e-09),
    (-6.60, 6.773339e-09),
    (-6.55, 8.900169e-09),
    (-6.50, 1.168267e-08),
    (-6.45, 1.531877e-08),
    (-6.40, 2.006465e-08),
    (-6.35, 2.625154e-08),
    (-6.30, 3.430695e-08),
    (-6.25, 4.478190e-08),
    (-6.20, 5.838545e-08),
    (-6.15, 7.602866e-08),
    (-6.10, 9.888021e-08),
    (-6.05, 1.284368e-07),
    (-6.00, 1.666120e-07),
    (-5.95, 2.158484e-07),
    (-5.90, 2.792578e-07),
    (-5.85, 3.607984e-07),
    (-5.80, 4.654953e-07),
    (-5.75, 5.997166e-07),
    (-5.70, 7.715169e-07),
    (-5.65, 9.910646e-07),
    (-5.60, 1.271172e-06),
    (-5.55, 1.627949e-06),
    (-5.50, 2.081614e-06),
    (-5.45, 2.657485e-06),
    (-5.40, 3.387204e-06),
    (-5.35, 4.310228e-06),
    (-5.30, 5.475653e-06),
    (-5.25, 6.944436e-06),
    (-5.20, 8.792084e-06),
    (-5.15, 1.111192e-05),
    (-5.10, 1.401900e-05),
    (-5.05, 1.765485e-05),
    (-5.00, 2.219315e-05),
    (-4.95, 2.784648e-05),
    (-4.90, 3.487436e-05),
    (-4.85, 4.359288e-05),
    (-4.80, 5.438594e-05),
    (-4.75, 6.771861e-05),
    (-4.70, 8.415278e-05),
    (-4.65, 1.043654e-04),
    (-4.60, 1.291696e-04),
    (-4.55, 1.595399e-04),
    (-4.50, 1.966399e-04),
    (-4.45, 2.418556e-04),
    (-4.40, 2.968326e-04),
    (-4.35, 3.635188e-04),
    (-4.30, 4.442123e-04),
    (-4.25, 5.416165e-04),
    (-4.20, 6.589002e-04),
    (-4.15, 7.997658e-04),
    (-4.10, 9.685245e-04),
    (-4.05, 1.170178e-03),
    (-4.00, 1.410511e-03),
    (-3.95, 1.696185e-03),
    (-3.90, 2.034847e-03),
    (-3.85, 2.435238e-03),
    (-3.80, 2.907315e-03),
    (-3.75, 3.462369e-03),
    (-3.70, 4.113154e-03),
    (-3.65, 4.874018e-03),
    (-3.60, 5.761028e-03),
    (-3.55, 6.792094e-03),
    (-3.50, 7.987094e-03),
    (-3.45, 9.367979e-03),
    (-3.40, 1.095887e-02),
    (-3.35, 1.278614e-02),
    (-3.30, 1.487847e-02),
    (-3.25, 1.726687e-02),
    (-3.20, 1.998468e-02),
    (-3.15, 2.306751e-02),
    (-3.10, 2.655319e-02),
    (-3.05, 3.048157e-02),
    (-3.00, 3.489440e-02),
    (-2.95, 3.983500e-02),
    (-2.90, 4.534800e-02),
    (-2.85, 5.147892e-02),
    (-2.80, 5.827377e-02),
    (-2.75, 6.577846e-02),
    (-2.70, 7.403827e-02),
    (-2.65, 8.309720e-02),
    (-2.60, 9.299727e-02),
    (-2.55, 1.037777e-01),
    (-2.50, 1.154743e-01),
    (-2.45, 1.281185e-01),
    (-2.40, 1.417364e-01),
    (-2.35, 1.563484e-01),
    (-2.30, 1.719680e-01),
    (-2.25, 1.886011e-01),
    (-2.20, 2.062455e-01),
    (-2.15, 2.248901e-01),
    (-2.10, 2.445146e-01),
    (-2.05, 2.650889e-01),
    (-2.00, 2.865731e-01),
    (-1.95, 3.089171e-01),
    (-1.90, 3.320611e-01),
    (-1.85, 3.559355e-01),
    (-1.80, 3.804617e-01),
    (-1.75, 4.055523e-01),
    (-1.70, 4.311125e-01),
    (-1.65, 4.570404e-01),
    (-1.60, 4.835935e-01),
    (-1.55, 5.086482e-01),
    (-1.50, 5.335113e-01),
    (-1.45, 5.580849e-01),
    (-1.40, 5.822761e-01),
    (-1.35, 6.059984e-01),
    (-1.30, 6.291723e-01),
    (-1.25, 6.517259e-01),
    (-1.20, 6.735957e-01),
    (-1.15, 6.947265e-01),
    (-1.10, 7.150719e-01),
    (-1.05, 7.345942e-01),
    (-1.00, 7.532643e-01),
    (-0.95, 7.710613e-01),
    (-0.90, 7.879724e-01),
    (-0.85, 8.039922e-01),
    (-0.80, 8.191221e-01),
    (-0.75, 8.333700e-01),
    (-0.70, 8.467495e-01),
    (-0.65, 8.592792e-01),
    (-0.60, 8.709820e-01),
    (-0.55, 8.818846e-01),
    (-0.50, 8.920165e-01),
    (-0.45, 9.014099e-01),
    (-0.40, 9.100988e-01),
    (-0.35, 9.181182e-01),
    (-0.30, 9.255043e-01),
    (-0.25, 9.322934e-01),
    (-0.20, 9.385216e-01),
    (-0.15, 9.442250e-01),
    (-0.10, 9.494385e-01),
    (-0.05, 9.541966e-01),
    (-0.00, 9.585321e-01),
    (0.05, 9.624768e-01),
    (0.10, 9.660611e-01),
    (0.15, 9.693136e-01),
    (0.20, 9.722616e-01),
    (0.25, 9.749306e-01),
    (0.30, 9.773445e-01),
    (0.35, 9.795257e-01),
    (0.40, 9.814949e-01),
    (0.45, 9.832715e-01),
    (0.50, 9.848731e-01),
    (0.55, 9.863161e-01),
    (0.60, 9.876156e-01),
    (0.65, 9.887853e-01),
    (0.70, 9.898379e-01),
    (0.75, 9.907847e-01),
    (0.80, 9.916362e-01),
    (0.85, 9.924019e-01),
    (0.90, 9.930903e-01),
    (0.95, 9.937093e-01),
    (1.00, 9.942659e-01),
    (1.05, 9.947665e-01),
    (1.10, 9.952166e-01),
    (1.15, 9.956216e-01),
    (1.20, 9.959859e-01),
    (1.25, 9.963138e-01),
    (1.30, 9.966089e-01),
    (1.35, 9.968747e-01),
    (1.40, 9.971141e-01),
    (1.45, 9.973299e-01),
    (1.50, 9.975243e-01),
    (1.55, 9.976995e-01),
    (1.60, 9.978576e-01),
    (1.65, 9.980001e-01),
    (1.70, 9.981286e-01),
    (1.75, 9.982445e-01),
    (1.80, 9.983490e-01),
    (1.85, 9.984432e-01),
    (1.90, 9.985280e-01),
    (1.95, 9.986043e-01),
    (2.00, 9.986730e-01),
    (2.05, 9.987345e-01),
    (2.10, 9.987896e-01),
    (2.15, 9.988388e-01),
    (2.20, 9.988825e-01),
    (2.25, 9.989212e-01),
    (2.30, 9.989552e-01),
    (2.35, 9.989848e-01),
    (2.40, 9.990103e-01),
    (2.45, 9.990319e-01),
    (2.50, 9.990499e-01),
    (2.55, 9.990642e-01),
    (2.60, 9.990752e-01),
    (2.65, 9.990827e-01),
    (2.70, 9.990870e-01),
    (2.75, 1.000000e+00),
];

/// Interpolated p-value; statistics outside the table clamp to its ends.
pub(super) fn p_value(stat: f64) -> f64 {
    let (lo, hi) = (TAU_P[0], TAU_P[TAU_P.len() - 1]);
    if stat <= lo.0 {
        return lo.1;
    }
    if stat >= hi.0 {
        return hi.1;
    }
    let i = TAU_P.partition_point(|&(tau, _)| tau <= stat);
    let ((t0, p0), (t1, p1)) = (TAU_P[i - 1], TAU_P[i]);
    let w = (stat - t0) / (t1 - t0);
    (p0.ln() + (p1.ln() - p0.ln()) * w).exp()
}

use crate::dog::Kernel;

/// Affine rescale of a kernel onto `[0, 1]`. Constant kernels map to 0.5
/// everywhere.
pub fn min_max_encode(kernel: &Kernel) -> Kernel {
    let w = kernel.weights();
    let (lo, hi) = w
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let encoded = if span > 0.0 {
        w.iter()
            .map(|&v| {
                if v == hi {
                    1.0
                } else {
                    ((v - lo) / span).clamp(0.0, 1.0)
                }
            })
            .collect()
    } else {
        vec![0.5; w.len()]
    };
    Kernel::new(kernel.size(), encoded).expect("encoding preserves shape and finiteness")
}

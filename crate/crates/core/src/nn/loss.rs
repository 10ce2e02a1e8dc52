use ndarray::Array2;

const CLAMP: f64 = 1e-7;

/// Mean binary cross-entropy and its gradient with respect to the
/// predictions. Predictions are clamped to `[1e-7, 1 − 1e-7]` first and the
/// gradient is taken at the clamped value.
pub fn bce_loss(predictions: &Array2<f64>, targets: &Array2<f64>) -> (f64, Array2<f64>) {
    assert_eq!(predictions.dim(), targets.dim(), "prediction and target shapes differ");
    let n = predictions.len() as f64;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(predictions.raw_dim());
    ndarray::Zip::from(&mut grad).and(predictions).and(targets).for_each(|g, &p, &t| {
        let p = p.clamp(CLAMP, 1.0 - CLAMP);
        loss -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        *g = (-t / p + (1.0 - t) / (1.0 - p)) / n;
    });
    (loss / n, grad)
}

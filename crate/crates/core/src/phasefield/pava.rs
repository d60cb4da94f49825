/// Euclidean projection of `values` onto non-increasing sequences
/// (pool-adjacent-violators), in place.
pub fn pava_nonincreasing(values: &mut [f64]) {
    // blocks of (sum, count); block means stay non-increasing
    let mut sums: Vec<f64> = Vec::with_capacity(values.len());
    let mut counts: Vec<usize> = Vec::with_capacity(values.len());
    for &x in values.iter() {
        sums.push(x);
        counts.push(1);
        while sums.len() > 1 {
            let k = sums.len() - 1;
            if sums[k - 1] / counts[k - 1] as f64 >= sums[k] / counts[k] as f64 {
                break;
            }
            let (s, c) = (sums.pop().unwrap(), counts.pop().unwrap());
            sums[k - 1] += s;
            counts[k - 1] += c;
        }
    }
    let mut pos = 0;
    for (s, c) in sums.iter().zip(&counts) {
        let mean = s / *c as f64;
        values[pos..pos + c].iter_mut().for_each(|v| *v = mean);
        pos += c;
    }
}

/// Projection of one free column segment onto `{1 >= x_1 >= ... >= x_n >= 0}`.
pub fn project_column(values: &mut [f64]) {
    pava_nonincreasing(values);
    values.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
}

use super::EvaluatedLandscape;

/// Strictly fitter than every neighbour.
#[inline]
pub fn is_local_peak(el: &EvaluatedLandscape, index: usize) -> bool {
    let f = el.fitness_at(index);
    let mut peak = true;
    el.for_each_neighbor(index, |q| peak &= f > el.fitness_at(q));
    peak
}

/// Indices of all local peaks, ascending.
pub fn local_peaks(el: &EvaluatedLandscape) -> Vec<usize> {
    (0..el.len()).filter(|&p| is_local_peak(el, p)).collect()
}

pub fn count_local_peaks(el: &EvaluatedLandscape) -> usize {
    (0..el.len()).filter(|&p| is_local_peak(el, p)).count()
}

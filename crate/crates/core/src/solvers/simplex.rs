//! Euclidean projection onto the probability simplex and onto products of
//! simplices (one per protein block).

/// Project `v` onto `{x : x ≥ 0, Σx = 1}` in place (sort-and-threshold).
/// Equal inputs receive equal outputs.
pub fn project_simplex(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Project every consecutive block of `block` entries onto the simplex.
pub fn project_blocks(v: &mut [f64], block: usize) {
    for chunk in v.chunks_mut(block) {
        project_simplex(chunk);
    }
}

//! Pixel-set distances on row-major boolean masks.

/// Exact Euclidean distance (in pixels) from every pixel to the nearest set
/// pixel of `mask`; `+∞` everywhere when the mask is empty.
///
/// Two passes of the lower-envelope-of-parabolas transform (Felzenszwalb and
/// Huttenlocher), columns first, then rows.
pub fn distance_transform(mask: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(mask.len(), width * height, "mask size must equal width × height");
    if !mask.iter().any(|&m| m) {
        return vec![f64::INFINITY; mask.len()];
    }
    let mut sq: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let mut line = Vec::with_capacity(width.max(height));
    let mut out = Vec::new();
    for col in 0..width {
        line.clear();
        line.extend((0..height).map(|row| sq[row * width + col]));
        transform_1d(&line, &mut out);
        for (row, v) in out.iter().enumerate() {
            sq[row * width + col] = *v;
        }
    }
    for row in 0..height {
        let span = row * width..(row + 1) * width;
        line.clear();
        line.extend_from_slice(&sq[span.clone()]);
        transform_1d(&line, &mut out);
        sq[span].copy_from_slice(&out);
    }
    sq.into_iter().map(f64::sqrt).collect()
}

/// `out[q] = min_p (q - p)² + f[p]`.
fn transform_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    // vertices of the lower envelope and the boundaries between them
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k: usize = 0;
    let first = match f.iter().position(|x| x.is_finite()) {
        Some(i) => i,
        None => return,
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let intersect = |p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
        // z[0] is -∞, so this stops at k = 0 at the latest
        let mut s = intersect(v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// `sup_{a ∈ A} dist(a, B)` in pixels. Zero for empty `A`, `+∞` for
/// nonempty `A` and empty `B`.
pub fn directed_hausdorff(a: &[bool], b: &[bool], width: usize, height: usize) -> f64 {
    if !a.iter().any(|&x| x) {
        return 0.0;
    }
    let dt = distance_transform(b, width, height);
    a.iter()
        .zip(&dt)
        .filter(|(x, _)| **x)
        .map(|(_, d)| *d)
        .fold(0.0, f64::max)
}

/// Fraction of `A` pixels within `tol` pixels of `B`; one for empty `A`.
pub fn fraction_within(a: &[bool], b: &[bool], width: usize, height: usize, tol: f64) -> f64 {
    let total = a.iter().filter(|&&x| x).count();
    if total == 0 {
        return 1.0;
    }
    let dt = distance_transform(b, width, height);
    let near = a.iter().zip(&dt).filter(|(x, d)| **x && **d <= tol).count();
    near as f64 / total as f64
}

/// Set pixels with no set pixel among their eight neighbors.
pub fn isolated_pixels(mask: &[bool], width: usize, height: usize) -> usize {
    assert_eq!(mask.len(), width * height, "mask size must equal width × height");
    let mut count = 0;
    for row in 0..height {
        for col in 0..width {
            if !mask[row * width + col] {
                continue;
            }
            let mut lonely = true;
            'scan: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (r, c) = (row as i64 + dr, col as i64 + dc);
                    if r >= 0 && c >= 0 && (r as usize) < height && (c as usize) < width && mask[r as usize * width + c as usize]
                    {
                        lonely = false;
                        break 'scan;
                    }
                }
            }
            if lonely {
                count += 1;
            }
        }
    }
    count
}

pub fn count(mask: &[bool]) -> usize {
    mask.iter().filter(|&&x| x).count()
}

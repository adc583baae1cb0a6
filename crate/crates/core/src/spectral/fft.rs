use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid;

type PlanKey = (usize, bool);

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// Unnormalized in-place d-dimensional transform of one component.
pub(crate) fn transform(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let d = grid.dim();
    debug_assert_eq!(data.len(), grid.modes());
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let total = data.len();

    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                if stride == 1 {
                    fft.process_with_scratch(&mut data[start..start + n], &mut scratch);
                    continue;
                }
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

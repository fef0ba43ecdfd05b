//! Symplectic Fourier transform of a Wigner field onto the chord grid.

use crate::{Normalization, PhaseField, WignerError};
use gridcore::spectral::{centered_dft_minus, centered_dft_plus};
use gridcore::{ChordGrid, C64};
use ndarray::Array2;

/// Characteristic function `W~(xi) = integral of W(x) exp(-i <x, xi>_s)`,
/// evaluated on the chord grid and indexed `[xi_q index, xi_p index]`. The
/// input must carry `Wigner` normalization so that `W~(0) = 1` for a state.
pub fn characteristic_function(
    field: &PhaseField,
) -> Result<(ChordGrid, Array2<C64>), WignerError> {
    if field.normalization() != Normalization::Wigner {
        return Err(WignerError::NormalizationMismatch {
            expected: Normalization::Wigner,
            got: field.normalization(),
        });
    }
    let base = field.grid().base();
    let chord = ChordGrid::new(base);
    let n = base.n();
    let cell = field.grid().cell_area();
    let vals = field.values();

    // q axis picks up exp(-i q xi_p): a minus-sign DFT for every p column.
    let mut mid: Array2<C64> = Array2::zeros((n, n));
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for kp in 0..n {
        for i in 0..n {
            buf[i] = vals[[i, kp]];
        }
        centered_dft_minus(&mut buf);
        for ks in 0..n {
            mid[[ks, kp]] = buf[ks];
        }
    }

    // p axis picks up exp(+i xi_q p): a plus-sign DFT for every xi_p row.
    let mut out: Array2<C64> = Array2::zeros((n, n));
    for ks in 0..n {
        for kp in 0..n {
            buf[kp] = mid[[ks, kp]];
        }
        centered_dft_plus(&mut buf);
        for js in 0..n {
            out[[js, ks]] = buf[js] * cell;
        }
    }
    Ok((chord, out))
}

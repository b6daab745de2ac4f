//! Sparse storage and sparse-times-dense kernels.

mod csr;
mod market;
mod segmented;
mod spmm;
mod tiled;

pub use csr::CsrMatrix;
pub use market::{parse_matrix_market, read_matrix_market};
pub use segmented::SegmentedDense;
pub use spmm::{maspmm, naive_spmm};
pub use tiled::{csr_to_tiled, TiledMatrix, DEFAULT_TILE_COLS, DEFAULT_TILE_ROWS};

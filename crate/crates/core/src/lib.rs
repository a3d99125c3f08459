pub mod cli;
pub mod error;
pub mod exact;
pub mod partitions;
pub mod qcurve;
pub mod toprec;
pub mod wavefunction;
pub mod wedge;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/wedge.md")]
    mod wedge {}
    #[doc = include_str!("../../../book/src/toprec.md")]
    mod toprec {}
    #[doc = include_str!("../../../book/src/wavefunction.md")]
    mod wavefunction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}

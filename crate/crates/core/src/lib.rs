pub mod anneal;
pub mod cbl;
pub mod error;
pub mod flow;
pub mod geom;
pub mod io;
pub mod ls;
pub mod model;
pub mod voltage;
pub mod wsr;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/voltage.md")]
    mod voltage {}
    #[doc = include_str!("../../../book/src/shifters.md")]
    mod shifters {}
    #[doc = include_str!("../../../book/src/floorplan.md")]
    mod floorplan {}
    #[doc = include_str!("../../../book/src/redistribution.md")]
    mod redistribution {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}

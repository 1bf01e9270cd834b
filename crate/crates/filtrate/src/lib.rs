//! Filtered simplicial sets over a finite poset.

pub mod anodyne;
pub mod error;
pub mod ex;
pub mod fsset;
pub mod hom;
pub mod homotopy;
pub mod ih;
pub mod io;
pub mod models;
pub mod poset;
pub mod product;
pub mod simplex;
pub mod snf;
pub mod standard;
pub mod subdivision;

pub use error::{Error, Result};
pub use fsset::{FMap, FSSet, Nf};
pub use poset::{Chain, Poset};

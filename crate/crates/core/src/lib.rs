pub mod corpus;
pub mod model;
pub mod special;
pub mod taxonomy;
pub mod trend;
pub mod selection;
pub mod pipeline;

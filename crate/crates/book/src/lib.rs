// mdbook can't run our snippets against a workspace crate, so every chapter
// is pulled in as the doc comment of an empty module and `cargo test --doc`
// runs them. One module per chapter so a failure points at its file.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/online.md")]
pub mod online {}
#[doc = include_str!("../../../book/src/tentative.md")]
pub mod tentative {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

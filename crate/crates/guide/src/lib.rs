//! Compiles the code blocks of the book in `book/src` as doc-tests.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[cfg(doctest)]
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub struct $name;
    };
}

chapter!(Intro, "intro.md");
chapter!(Weights, "weights.md");
chapter!(Systems, "systems.md");
chapter!(Averages, "averages.md");
chapter!(Expsums, "expsums.md");
chapter!(Maximal, "maximal.md");
chapter!(Correlations, "correlations.md");
chapter!(Cli, "cli.md");
chapter!(Reproducibility, "reproducibility.md");

// Runs every example in-process.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(quaternion_arithmetic);
example!(vector_identities);
example!(harmonic_products);
example!(planar_algebra);
example!(radial_algebra);
example!(maximum_modulus);
example!(spectrum_recovery);

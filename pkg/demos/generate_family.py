"""Generate the first members of both families and check them exactly."""
from mvop.eigensolver import generate_family, verify_eigen_equation
from mvop.families import default_bundle
from mvop.weights import inner_product


def main(N: int = 4) -> None:
    for kind in ("one-step", "two-step"):
        b = default_bundle(kind)
        fam = generate_family(b, "D1", N)
        print(f"{kind}: alpha={b.params.alpha}, beta={b.params.beta}")
        print("  P_2 leading coefficient:", fam.p(2).lead())
        for name in ("D1", "D2", "D3"):
            if name in b.operators:
                print(f"  eigen equation for {name}:", bool(verify_eigen_equation(fam, name)))
        gram = [[inner_product(fam.p(m), fam.p(n), b.W_tilde).is_zero() for n in range(N + 1)] for m in range(N + 1)]
        print("  off-diagonal Gram blocks vanish:", all(gram[m][n] for m in range(N + 1) for n in range(N + 1) if m != n))


if __name__ == "__main__":
    main()

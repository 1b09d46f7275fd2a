"""The constants C_r and D_r, two ways.

The fast route rewrites each Euler product as a finite product over small
primes times a rapidly converging series in prime zeta values.  The slow
route multiplies the local factors up to a bound and adds a tail estimate.
Both come with rigorous error bounds, so their intervals must overlap.
"""
from mpmath import mp

from artin_density.constants import artin_family, direct_product_crosscheck, euler_constant, multi_family


def main():
    print(f"{'name':<5} {'accelerated (25 digits)':<29} {'direct product to 10^6':<22} overlap")
    for r in range(1, 5):
        for fam in (artin_family(r), multi_family(r)):
            if r == 1 and fam.name.startswith("D"):
                continue  # D_1 = C_1
            fast = euler_constant(fam, 25)
            slow = direct_product_crosscheck(fam, 10**6)
            with mp.workdps(35):
                ok = abs(fast.value - slow.value) <= fast.error_bound + slow.error_bound
                print(f"{fam.name:<5} {mp.nstr(fast.value, 25):<29} {mp.nstr(slow.value, 12):<22} {ok}")

    # the accelerated method scales to high precision
    c1 = euler_constant(artin_family(1), 100)
    print("\nC_1 to 100 digits:")
    print(c1.decimal(100))


if __name__ == "__main__":
    main()

"""Hand-transcribed reference values used as test oracles."""

# (lambda_1, lambda_2, lambda_3, lambda_4) as 1-based parties -> pattern, in label order
TABLE_ONE = [
    ((3, 4, 6, 5), "00XXXX"), ((3, 5, 4, 6), "00XXXX"),
    ((2, 4, 6, 5), "0X0XXX"), ((2, 5, 4, 6), "0X0XXX"),
    ((2, 5, 3, 6), "0XX0XX"), ((3, 2, 6, 5), "0XX0XX"),
    ((2, 4, 3, 6), "0XXX0X"), ((3, 2, 4, 6), "0XXX0X"),
    ((2, 4, 3, 5), "0XXXX0"), ((3, 2, 4, 5), "0XXXX0"),
    ((1, 4, 6, 5), "X00XXX"), ((1, 5, 4, 6), "X00XXX"),
    ((1, 5, 3, 6), "X0X0XX"), ((3, 5, 6, 1), "X0X0XX"),
    ((1, 4, 3, 6), "X0XX0X"), ((3, 4, 6, 1), "X0XX0X"),
    ((1, 4, 3, 5), "X0XXX0"), ((3, 5, 4, 1), "X0XXX0"),
    ((1, 2, 6, 5), "XX00XX"), ((2, 5, 6, 1), "XX00XX"),
    ((1, 2, 4, 6), "XX0X0X"), ((2, 4, 6, 1), "XX0X0X"),
    ((1, 2, 4, 5), "XX0XX0"), ((2, 5, 4, 1), "XX0XX0"),
    ((1, 2, 3, 6), "XXX00X"), ((3, 2, 6, 1), "XXX00X"),
    ((1, 2, 3, 5), "XXX0X0"), ((2, 5, 3, 1), "XXX0X0"),
    ((2, 4, 3, 1), "XXXX00"), ((3, 2, 4, 1), "XXXX00"),
]


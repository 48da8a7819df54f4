#pragma once

// Layered slice programs for the two fixed planar graphs: the theta graph
// (two trivalent coupons xu, xv joined by three edges) and the tetrahedral
// graph (four coupons x1..x4, six edges). One program per cut edge; each is a
// bottom-to-top layering of one planar presentation of the cut graph, with a
// pivotal coupon w inserted on every edge.
//
// Format (line oriented, '#' comments):
//   graph <name>
//   slots <colors...>                e.g.  slots i j k l m n
//   coupon <name> <c1> <c2> <c3>     coupon tensor in V_c1 x V_c2 x V_c3
//   cut <color>                      color of the open strand
//   layer <blocks...>                blocks act on adjacent strands, left
//                                    to right
// Blocks:
//   id       pass one strand through
//   <coupon> insert that coupon (creates its three strands)
//   w:<c>    pivotal coupon, consumes V_c, produces V_{c*}^*
//   b:<c>    cup  C -> V_c x V_c^*
//   bp:<c>   cup  C -> V_c^* x V_c        (carries K^{r-1})
//   d:<c>    cap  V_c^* x V_c -> C
//   dp:<c>   cap  V_c x V_c^* -> C        (carries K^{1-r})
// A color token may be starred (e.g. k*), meaning the involuted color.

namespace tetratv::programs {

inline constexpr const char* theta_cut_a = R"(
graph theta
slots a b c
coupon xu a b c
coupon xv c* b* a*
cut a
layer xu id
layer id id id w:a
layer id id id xv id
layer id id id id id dp:a*
layer id id w:c id id
layer id id d:c* id
layer id w:b id
layer id d:b*
)";

inline constexpr const char* theta_cut_b = R"(
graph theta
slots a b c
coupon xu a b c
coupon xv c* b* a*
cut b
layer w:b
layer id bp:c*
layer id id xv id
layer id d:c* id id id
layer d:b* id id
layer id xu id
layer id w:a id id id
layer dp:a* id id id
layer id w:c id
layer id d:c*
)";

inline constexpr const char* theta_cut_c = R"(
graph theta
slots a b c
coupon xu a b c
coupon xv c* b* a*
cut c
layer w:c
layer id xv
layer d:c* id id
layer id id xu
layer id id w:a id id
layer id dp:a* id id
layer id w:b id
layer dp:b* id
)";

// Theta with the c edge reversed (and relabeled c*): used to exercise the
// reversion invariance of the evaluation.
inline constexpr const char* theta_cut_a_revc = R"(
graph theta_revc
slots a b c
coupon xu a b c
coupon xv c* b* a*
cut a
layer xu id
layer id id id w:a
layer id id id xv id
layer id id id id id dp:a*
layer id id id w:c* id
layer id id dp:c id
layer id w:b id
layer id d:b*
)";

inline constexpr const char* tetra_cut_i = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut i
layer x4 id
layer id id id w:i
layer id id dp:i*
layer x2 id id
layer id id id id id x3
layer id id id w:m id id id id
layer id id dp:m* id id id id
layer id id id w:n id id
layer id id dp:n* id id
layer id w:l id id
layer id d:l* id
layer x1 id id
layer id id id w:k id
layer id id dp:k* id
layer id w:j id
layer id d:j*
)";

inline constexpr const char* tetra_cut_j = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut j
layer x3 id
layer id id id w:j
layer id id dp:j*
layer b:i* id id
layer id x4 id id id
layer id id id dp:i* id id
layer id id id w:n id
layer id id dp:n* id
layer id id id b:l
layer id id id id b:m* id
layer id id id id id x2 id id
layer id id id id id id id dp:m* id
layer id id id id id id dp:l
layer id id id w:l id id
layer id id dp:l* id id
layer id w:m id id
layer id d:m* id
layer id x1 id
layer id w:i id id id
layer dp:i* id id id
layer id id w:k
layer id dp:k*
)";

inline constexpr const char* tetra_cut_k = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut k
layer x1 id
layer id id id w:k
layer id id dp:k*
layer id b:i* id
layer id id x4 id id
layer id id id id dp:i* id
layer w:i id id id id
layer d:i* id id id
layer id id x3 id
layer id id w:n id id id
layer id dp:n* id id id
layer id id id w:j
layer id id dp:j*
layer id id b:l
layer id id id b:m* id
layer id id id id x2 id id
layer id id id id id id dp:m* id
layer id id id id id dp:l
layer id id w:l id id
layer id dp:l* id id
layer w:m id id
layer d:m* id
)";

inline constexpr const char* tetra_cut_l = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut l
layer w:l
layer id b:l*
layer id id b:j* id
layer id id id x3 id id
layer id id id id id dp:j* id
layer id id id id dp:l*
layer d:l* id id
layer id b:j id
layer id id b:k* id id
layer id id id x1 id id id
layer id id id id id dp:k* id id
layer id id id id dp:j id
layer id w:j id id id
layer dp:j* id id id
layer id id id b:n*
layer id id id id b:i* id
layer id id id id id x4 id id
layer id id id id id id id dp:i* id
layer id id id id id id dp:n*
layer id id w:n id id id
layer id id d:n* id id
layer id w:i id id
layer id d:i* id
layer id x2 id
layer id w:k id id id
layer dp:k* id id id
layer id id w:m
layer id dp:m*
)";

inline constexpr const char* tetra_cut_m = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut m
layer x2 id
layer id id id w:m
layer id id dp:m*
layer x1 id id
layer id id id w:k id
layer id id dp:k* id
layer id id id b:l*
layer id id id id b:j* id
layer id id id id id x3 id id
layer id id id id id id id dp:j* id
layer id id id id id id dp:l*
layer id id w:l id id id
layer id id d:l* id id
layer id w:j id id
layer id d:j* id
layer id id b:n*
layer id id id b:i* id
layer id id id id x4 id id
layer id id id id id id dp:i* id
layer id id id id id dp:n*
layer id w:n id id id
layer id d:n* id id
layer w:i id id
layer d:i* id
)";

inline constexpr const char* tetra_cut_n = R"(
graph tetra
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut n
layer w:n
layer id b:n*
layer id id b:i* id
layer id id id x4 id id
layer id id id id id dp:i* id
layer id id id id dp:n*
layer d:n* id id
layer id x1 id
layer id w:i id id id
layer dp:i* id id id
layer id id x2 id
layer id id w:k id id id
layer id dp:k* id id id
layer id id id w:m
layer id id dp:m*
layer id id b:l*
layer id id id b:j* id
layer id id id id x3 id id
layer id id id id id id dp:j* id
layer id id id id id dp:l*
layer id w:l id id id
layer id d:l* id id
layer w:j id id
layer d:j* id
)";

// Tetrahedron with the n edge reversed (relabeled n*): reversion check.
inline constexpr const char* tetra_cut_i_revn = R"(
graph tetra_revn
slots i j k l m n
coupon x1 i j k*
coupon x2 k l m*
coupon x3 n l* j*
coupon x4 m n* i*
cut i
layer x4 id
layer id id id w:i
layer id id dp:i*
layer x2 id id
layer id id id id id x3
layer id id id w:m id id id id
layer id id dp:m* id id id id
layer id id w:n* id id id
layer id id d:n id id
layer id w:l id id
layer id d:l* id
layer x1 id id
layer id id id w:k id
layer id id dp:k* id
layer id w:j id
layer id d:j*
)";

inline constexpr const char* theta_cuts[3] = {theta_cut_a, theta_cut_b, theta_cut_c};
inline constexpr const char* tetra_cuts[6] = {tetra_cut_i, tetra_cut_j, tetra_cut_k,
                                              tetra_cut_l, tetra_cut_m, tetra_cut_n};

}  // namespace tetratv::programs

// SPDX-License-Identifier: Apache-2.0
#include "gert/rt/tracer.hpp"

#include "gert/em/fresnel.hpp"
#include "gert/em/material.hpp"
#include "gert/em/utd.hpp"
#include "gert/error.hpp"
#include "gert/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace gert::rt {

namespace {

using std::complex;

constexpr double kPi = 3.14159265358979323846;
constexpr double kClearance = 1e-6;      // visibility offset, metres
constexpr double kPlaneEps = 1e-9;       // "on the plane" threshold, metres
constexpr double kFrustumSlack = 1e-6;   // containment slack, metres

void validate_config(const TraceConfig& cfg) {
    if (cfg.max_reflection_order < 0 || cfg.max_reflection_order > 7)
        throw Error("trace: max_reflection_order must be between 0 and 7");
    if (!(cfg.frequency_hz > 0.0))
        throw Error("trace: frequency_hz must be positive");
}

double signed_dist(const TxImageTree::Plane& p, const Vec3& x) {
    return p.n.dot(x) - p.c;
}

bool box_outside_plane(const Aabb& b, const TxImageTree::Plane& p) {
    // Outside when every corner is strictly behind the plane.
    for (int i = 0; i < 8; ++i) {
        const Vec3 c{(i & 1) ? b.hi.x : b.lo.x,
                     (i & 2) ? b.hi.y : b.lo.y,
                     (i & 4) ? b.hi.z : b.lo.z};
        if (signed_dist(p, c) >= -kPlaneEps) return false;
    }
    return true;
}

bool box_in_frustum(const Aabb& b, const std::vector<TxImageTree::Plane>& planes) {
    for (const auto& p : planes)
        if (box_outside_plane(b, p)) return false;
    return true;
}

bool point_in_frustum(const Vec3& x, const std::vector<TxImageTree::Plane>& planes) {
    for (const auto& p : planes)
        if (signed_dist(p, x) < -kFrustumSlack) return false;
    return true;
}

/// Conservative bounding frustum of the beam leaving facet `f` after a
/// reflection whose cumulative image point is `image`: the cone from the
/// image through the facet's hull, restricted to the far side of the
/// facet's plane.
std::vector<TxImageTree::Plane> make_frustum(const Vec3& image, const Facet& f) {
    std::vector<TxImageTree::Plane> planes;
    const double side = f.normal.dot(image) - f.plane_d; // image side of the plane
    const double sgn = side >= 0.0 ? 1.0 : -1.0;
    planes.push_back({f.normal * -sgn, -sgn * f.plane_d});

    Vec3 centroid{};
    for (const Vec3& v : f.hull) centroid += v;
    centroid = centroid / static_cast<double>(f.hull.size());

    const size_t m = f.hull.size();
    for (size_t i = 0; i < m; ++i) {
        const Vec3& a = f.hull[i];
        const Vec3& b = f.hull[(i + 1) % m];
        Vec3 n = cross(a - image, b - image);
        const double len = n.norm();
        if (len < 1e-12) continue; // apex collinear with the edge: drop (conservative)
        n = n / len;
        double c = n.dot(image);
        if (n.dot(centroid) - c < 0.0) {
            n = -n;
            c = -c;
        }
        planes.push_back({n, c});
    }
    return planes;
}

/// Unit field direction of an ideal vertically polarised antenna for a ray
/// leaving along k (the theta direction); falls back to a fixed horizontal
/// reference when k is vertical.
Vec3 vertical_pol(const Vec3& k) {
    Vec3 v = Vec3{0, 0, 1} - Vec3{0, 0, 1}.dot(k) * k;
    double n = v.norm();
    if (n < 1e-9) {
        v = Vec3{1, 0, 0} - Vec3{1, 0, 0}.dot(k) * k;
        n = v.norm();
    }
    return v / n;
}

struct CVec3 {
    complex<double> x{}, y{}, z{};
};

CVec3 scaled(const Vec3& v, const complex<double>& s) {
    return {s * v.x, s * v.y, s * v.z};
}

CVec3 operator+(const CVec3& a, const CVec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

complex<double> dot(const CVec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

complex<double> permittivity_of(const scene::Scene& scene, int64_t object_id,
                                double f_hz) {
    const auto it = scene.materials.find(object_id);
    if (it == scene.materials.end())
        throw Error("trace: no material for object " + std::to_string(object_id));
    return em::complex_permittivity(it->second, f_hz);
}

} // namespace

TxImageTree expand_images(const AccelStructure& accel, const Vec3& tx,
                          const TraceConfig& cfg) {
    validate_config(cfg);
    TxImageTree tree;
    tree.tx = tx;
    if (cfg.max_reflection_order == 0) return tree;

    const auto& facets = accel.facets();

    // Depth-1 nodes: every facet the transmitter is strictly off of.
    for (size_t fi = 0; fi < facets.size(); ++fi) {
        const Facet& f = facets[fi];
        if (f.hull.size() < 3) continue;
        if (std::abs(f.normal.dot(tx) - f.plane_d) < kPlaneEps) continue;
        TxImageTree::Node node;
        node.facet = static_cast<int32_t>(fi);
        node.parent = -1;
        node.depth = 1;
        node.image = mirror_point(tx, f.normal, f.plane_d);
        node.frustum = make_frustum(node.image, f);
        tree.nodes.push_back(std::move(node));
    }

    // Breadth-first growth; nodes are only appended, so indexing by a
    // growing cursor walks each depth level in turn.
    for (size_t cursor = 0; cursor < tree.nodes.size(); ++cursor) {
        if (tree.nodes[cursor].depth >= cfg.max_reflection_order) continue;
        const int32_t parent_facet = tree.nodes[cursor].facet;
        for (size_t fi = 0; fi < facets.size(); ++fi) {
            const Facet& f = facets[fi];
            if (f.hull.size() < 3) continue;
            if (same_plane(f, facets[static_cast<size_t>(parent_facet)])) continue;
            const Vec3 parent_image = tree.nodes[cursor].image;
            if (std::abs(f.normal.dot(parent_image) - f.plane_d) < kPlaneEps) continue;
            if (!box_in_frustum(f.box, tree.nodes[cursor].frustum)) continue;
            TxImageTree::Node node;
            node.facet = static_cast<int32_t>(fi);
            node.parent = static_cast<int32_t>(cursor);
            node.depth = tree.nodes[cursor].depth + 1;
            node.image = mirror_point(parent_image, f.normal, f.plane_d);
            node.frustum = make_frustum(node.image, f);
            tree.nodes.push_back(std::move(node));
        }
    }
    return tree;
}

namespace {

/// Validate one candidate facet sequence for rx against the scene and, on
/// success, append the finished path.
void try_reflection_path(const scene::Scene& scene, const AccelStructure& accel,
                         const TxImageTree& tree, int32_t leaf, const Vec3& rx,
                         const TraceConfig& cfg, std::vector<Path>& out) {
    const auto& facets = accel.facets();

    // Facet chain and cumulative images, bounce order.
    const int depth = tree.nodes[static_cast<size_t>(leaf)].depth;
    std::vector<int32_t> seq(static_cast<size_t>(depth));
    std::vector<Vec3> images(static_cast<size_t>(depth));
    for (int32_t n = leaf, i = depth - 1; n >= 0;
         n = tree.nodes[static_cast<size_t>(n)].parent, --i) {
        seq[static_cast<size_t>(i)] = tree.nodes[static_cast<size_t>(n)].facet;
        images[static_cast<size_t>(i)] = tree.nodes[static_cast<size_t>(n)].image;
    }

    // Backtrack reflection points from rx toward tx.
    std::vector<Vec3> pts(static_cast<size_t>(depth));
    Vec3 r = rx;
    for (int i = depth - 1; i >= 0; --i) {
        const Facet& f = facets[static_cast<size_t>(seq[static_cast<size_t>(i)])];
        const Vec3& q = images[static_cast<size_t>(i)];
        const Vec3 d = r - q;
        const double denom = f.normal.dot(d);
        if (std::abs(denom) < 1e-15) return;
        const double t = (f.plane_d - f.normal.dot(q)) / denom;
        if (t <= 1e-12 || t >= 1.0 - 1e-12) return;
        pts[static_cast<size_t>(i)] = q + t * d;
        r = pts[static_cast<size_t>(i)];
    }

    // Forward validation: each leg's first hit must be the intended facet at
    // the intended point; the last leg must be clear.
    Vec3 prev = tree.tx;
    for (int i = 0; i < depth; ++i) {
        const Vec3 d = pts[static_cast<size_t>(i)] - prev;
        const double len = d.norm();
        if (len < 1e-9) return;
        const auto hit = accel.nearest(prev, d / len, kClearance, len + kClearance);
        if (!hit || hit->facet != seq[static_cast<size_t>(i)]) return;
        if (std::abs(hit->t - len) > kClearance) return;
        prev = pts[static_cast<size_t>(i)];
    }
    if (!accel.segment_clear(pts.back(), rx, kClearance)) return;

    Path path;
    path.kind = PathKind::reflection;
    path.vertices.reserve(static_cast<size_t>(depth) + 2);
    path.vertices.push_back(tree.tx);
    for (const Vec3& p : pts) path.vertices.push_back(p);
    path.vertices.push_back(rx);
    path.reflections.reserve(static_cast<size_t>(depth));
    for (int i = 0; i < depth; ++i) {
        const Facet& f = facets[static_cast<size_t>(seq[static_cast<size_t>(i)])];
        const Vec3 k_in = (path.vertices[static_cast<size_t>(i) + 1] -
                           path.vertices[static_cast<size_t>(i)]).normalized();
        Reflection refl;
        refl.object_id = f.object_id;
        refl.facet = seq[static_cast<size_t>(i)];
        const double c = std::min(1.0, std::abs(k_in.dot(f.normal)));
        refl.incidence_rad = std::acos(c);
        refl.normal = k_in.dot(f.normal) < 0.0 ? f.normal : -f.normal;
        path.reflections.push_back(refl);
    }
    evaluate_path(path, scene, cfg);
    out.push_back(std::move(path));
}

void try_diffraction_path(const scene::Scene& scene, const AccelStructure& accel,
                          int32_t edge_index, const Vec3& tx, const Vec3& rx,
                          const TraceConfig& cfg, std::vector<Path>& out) {
    const DiffractionEdge& e = accel.edges()[static_cast<size_t>(edge_index)];
    const Vec3 ev = e.direction;
    const double len = (e.b - e.a).dot(ev);

    const Vec3 ta = tx - e.a;
    const Vec3 ra = rx - e.a;
    const double u_t = ta.dot(ev);
    const double u_r = ra.dot(ev);
    const double rho_t = (ta - u_t * ev).norm();
    const double rho_r = (ra - u_r * ev).norm();
    if (rho_t < 1e-9 || rho_r < 1e-9) return;

    // Keller cone point by unfolding the two legs about the edge line.
    const double u_star = (u_t * rho_r + u_r * rho_t) / (rho_t + rho_r);
    if (u_star < 0.0 || u_star > len) return;
    const Vec3 q = e.a + u_star * ev;

    const Vec3 leg_in = q - tx;
    const Vec3 leg_out = rx - q;
    const double s1 = leg_in.norm();
    const double s2 = leg_out.norm();
    if (s1 < 1e-9 || s2 < 1e-9) return;

    const double phi_in = e.azimuth(tx - q);
    const double phi_out = e.azimuth(rx - q);
    const double span = e.n_index * kPi;
    if (phi_in <= 1e-9 || phi_in >= span - 1e-9) return;
    if (phi_out <= 1e-9 || phi_out >= span - 1e-9) return;

    const double beta0 = std::acos(std::clamp(leg_in.dot(ev) / s1, -1.0, 1.0));
    if (std::sin(beta0) < 1e-9) return;

    if (!accel.segment_clear(tx, q, kClearance)) return;
    if (!accel.segment_clear(q, rx, kClearance)) return;

    Path path;
    path.kind = PathKind::diffraction;
    path.vertices = {tx, q, rx};
    Diffraction d;
    d.object_id = e.object_id;
    d.edge = edge_index;
    d.n_index = e.n_index;
    d.phi_in_rad = phi_in;
    d.phi_out_rad = phi_out;
    d.beta0_rad = beta0;
    d.edge_direction = ev;
    d.tangent_o = e.tangent_o;
    d.normal_o = e.normal_o;
    path.diffraction = d;
    evaluate_path(path, scene, cfg);
    out.push_back(std::move(path));
}

} // namespace

PathSet find_paths(const scene::Scene& scene, const AccelStructure& accel,
                   const TxImageTree& tree, const Vec3& rx,
                   const TraceConfig& cfg) {
    validate_config(cfg);
    PathSet set;
    set.tx = tree.tx;
    set.rx = rx;
    set.config = cfg;

    if ((rx - tree.tx).norm() < 1e-9)
        throw GeometryError("trace: tx and rx coincide");

    if (accel.segment_clear(tree.tx, rx, kClearance)) {
        Path los;
        los.kind = PathKind::line_of_sight;
        los.vertices = {tree.tx, rx};
        evaluate_path(los, scene, cfg);
        set.paths.push_back(std::move(los));
    }

    for (size_t n = 0; n < tree.nodes.size(); ++n) {
        if (!point_in_frustum(rx, tree.nodes[n].frustum)) continue;
        try_reflection_path(scene, accel, tree, static_cast<int32_t>(n), rx, cfg,
                            set.paths);
    }

    if (cfg.diffraction_enabled) {
        const auto n_edges = static_cast<int32_t>(accel.edges().size());
        for (int32_t e = 0; e < n_edges; ++e)
            try_diffraction_path(scene, accel, e, tree.tx, rx, cfg, set.paths);
    }
    return set;
}

PathSet find_paths(const scene::Scene& scene, const AccelStructure& accel,
                   const Vec3& tx, const Vec3& rx, const TraceConfig& cfg) {
    const TxImageTree tree = expand_images(accel, tx, cfg);
    return find_paths(scene, accel, tree, rx, cfg);
}

void evaluate_path(Path& path, const scene::Scene& scene, const TraceConfig& cfg) {
    validate_config(cfg);
    if (path.vertices.size() < 2)
        throw GeometryError("evaluate_path: need at least tx and rx vertices");

    const double lambda = em::kSpeedOfLight / cfg.frequency_hz;
    const double k = 2.0 * kPi / lambda;

    double total = 0.0;
    for (size_t i = 0; i + 1 < path.vertices.size(); ++i)
        total += (path.vertices[i + 1] - path.vertices[i]).norm();
    if (total < 1e-9)
        throw GeometryError("evaluate_path: degenerate path of zero length");
    path.delay_s = total / em::kSpeedOfLight;

    const complex<double> phase = std::exp(complex<double>(0.0, -k * total));

    switch (path.kind) {
    case PathKind::line_of_sight: {
        path.amplitude = lambda / (4.0 * kPi * total) * phase;
        return;
    }
    case PathKind::reflection: {
        if (path.reflections.size() + 2 != path.vertices.size())
            throw GeometryError("evaluate_path: reflection count does not match vertices");
        Vec3 k_dir = (path.vertices[1] - path.vertices[0]).normalized();
        CVec3 field = scaled(vertical_pol(k_dir), 1.0);
        for (size_t i = 0; i < path.reflections.size(); ++i) {
            const Reflection& refl = path.reflections[i];
            const Vec3 k_in = k_dir;
            const Vec3 k_out = (path.vertices[i + 2] - path.vertices[i + 1]).normalized();
            const Vec3 n = refl.normal;

            Vec3 e_te = cross(k_in, n);
            const double te_norm = e_te.norm();
            if (te_norm > 1e-9) {
                e_te = e_te / te_norm;
            } else {
                // Normal incidence: the TE direction is any transverse unit
                // vector; the TE and TM coefficients coincide there.
                e_te = vertical_pol(n);
            }
            const Vec3 e_tm_in = cross(e_te, k_in);
            const Vec3 e_tm_out = cross(k_out, e_te);

            // Grazing bounces can round the stored incidence to the pi/2
            // double itself; clamp strictly below the Fresnel domain edge.
            static const double kMaxTheta = std::nextafter(kPi / 2.0, 0.0);
            const double theta = std::min(refl.incidence_rad, kMaxTheta);
            const auto gamma = em::fresnel_reflection(
                permittivity_of(scene, refl.object_id, cfg.frequency_hz), theta);

            const complex<double> a_te = dot(field, e_te);
            const complex<double> a_tm = dot(field, e_tm_in);
            field = scaled(e_te, gamma.te * a_te) + scaled(e_tm_out, gamma.tm * a_tm);
            k_dir = k_out;
        }
        const complex<double> projection = dot(field, vertical_pol(k_dir));
        path.amplitude = lambda / (4.0 * kPi * total) * projection * phase;
        return;
    }
    case PathKind::diffraction: {
        if (!path.diffraction || path.vertices.size() != 3)
            throw GeometryError("evaluate_path: diffraction path needs tx, edge point, rx");
        const Diffraction& d = *path.diffraction;
        const Vec3 leg_in = path.vertices[1] - path.vertices[0];
        const Vec3 leg_out = path.vertices[2] - path.vertices[1];
        const double s1 = leg_in.norm();
        const double s2 = leg_out.norm();
        const Vec3 s_in = leg_in / s1;
        const Vec3 s_out = leg_out / s2;

        const double cone_in = std::acos(std::clamp(s_in.dot(d.edge_direction), -1.0, 1.0));
        const double cone_out = std::acos(std::clamp(s_out.dot(d.edge_direction), -1.0, 1.0));
        if (std::abs(cone_in - cone_out) > 1e-6)
            throw GeometryError("evaluate_path: diffraction point violates the cone condition");

        const complex<double> eps =
            permittivity_of(scene, d.object_id, cfg.frequency_hz);
        const complex<double> ds = em::utd_coefficient(
            d.n_index, eps, eps, d.phi_in_rad, d.phi_out_rad, d.beta0_rad, s1, s2, k,
            em::Polarization::soft);
        const complex<double> dh = em::utd_coefficient(
            d.n_index, eps, eps, d.phi_in_rad, d.phi_out_rad, d.beta0_rad, s1, s2, k,
            em::Polarization::hard);

        // Edge-fixed ray bases: the primed (incidence) azimuth vector takes
        // the opposite sign so that both scalar limits (field parallel and
        // transverse to the edge) carry the coefficient with a plus sign.
        const Vec3 phi_in_hat = -cross(d.edge_direction, s_in).normalized();
        const Vec3 beta_in_hat = cross(phi_in_hat, s_in);
        const Vec3 phi_out_hat = cross(d.edge_direction, s_out).normalized();
        const Vec3 beta_out_hat = cross(phi_out_hat, s_out);

        const Vec3 e_in = vertical_pol(s_in);
        const complex<double> a_beta = -ds * e_in.dot(beta_in_hat);
        const complex<double> a_phi = -dh * e_in.dot(phi_in_hat);
        const CVec3 field = scaled(beta_out_hat, a_beta) + scaled(phi_out_hat, a_phi);
        const complex<double> projection = dot(field, vertical_pol(s_out));

        const double spread = 1.0 / std::sqrt(s1 * s2 * (s1 + s2));
        path.amplitude = lambda / (4.0 * kPi) * projection * spread * phase;
        return;
    }
    }
    throw GeometryError("evaluate_path: unknown path kind");
}

} // namespace gert::rt

// Copyright 2026 The bsvg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bsvg/objectives.hpp>
#include <bsvg/image_io.hpp>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>

#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace bsvg {

ImageLoss multiscale_mse(const Canvas& rendered, const Canvas& target, int levels) {
    if (!rendered.same_shape(target))
        throw Error(Errc::dimension_mismatch, "multiscale_mse: image shapes differ");
    const auto pr = downsample_blur(rendered, levels);
    const auto pt = downsample_blur(target, levels);
    ImageLoss out;
    std::vector<Canvas> grads;
    grads.reserve(pr.size());
    for (size_t l = 0; l < pr.size(); ++l) {
        const double inv = 1.0 / static_cast<double>(pr[l].size());
        Canvas g(pr[l].width, pr[l].height, pr[l].channels);
        double sum = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            const double r = pr[l].pixels[i] - pt[l].pixels[i];
            sum += r * r;
            g.pixels[i] = 2.0 * r * inv;
        }
        out.value += sum * inv;
        grads.push_back(std::move(g));
    }
    out.grad = downsample_blur_adjoint(grads);
    return out;
}

Canvas apply_target_opacity(const Canvas& target, const Eigen::VectorXd& background, double opacity) {
    if (background.size() != target.channels)
        throw Error(Errc::dimension_mismatch, "apply_target_opacity: background channel count");
    if (!(opacity >= 0.0 && opacity <= 1.0))
        throw Error(Errc::invalid_argument, "apply_target_opacity: opacity must be in [0, 1]");
    Canvas out = target;
    const size_t C = static_cast<size_t>(target.channels);
    for (size_t i = 0; i < out.size(); ++i) {
        const double bg = background(static_cast<Eigen::Index>(i % C));
        out.pixels[i] = bg + opacity * (target.pixels[i] - bg);
    }
    return out;
}

GeomLoss bbox_loss(const Points2& points, const Eigen::Vector2d& b_min, const Eigen::Vector2d& b_max,
                   BoxPenalty phi) {
    if (!(b_min.array() < b_max.array()).all())
        throw Error(Errc::invalid_argument, "bbox_loss: inverted box");
    auto f = [phi](double v, double& dv) {
        if (phi == BoxPenalty::relu) {
            dv = v > 0.0 ? 1.0 : 0.0;
            return v > 0.0 ? v : 0.0;
        }
        // Stable softplus.
        dv = 1.0 / (1.0 + std::exp(-v));
        return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    };
    GeomLoss out;
    out.grad = Points2::Zero(points.rows(), 2);
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (int c = 0; c < 2; ++c) {
            double d1 = 0.0, d2 = 0.0;
            out.value += f(b_min(c) - points(i, c), d1) + f(points(i, c) - b_max(c), d2);
            out.grad(i, c) = -d1 + d2;
        }
    return out;
}

RepulsionLoss repulsion_loss(const Points2& x, const Points2& t, bool closed, const RepulsionOptions& o) {
    if (x.rows() != t.rows())
        throw Error(Errc::dimension_mismatch, "repulsion_loss: points and tangents differ in length");
    if (x.rows() < 3)
        throw Error(Errc::invalid_argument, "repulsion_loss: need at least 3 samples");
    if (!(o.alpha >= 2.0) || !(o.beta > 0.0) || o.window < 0 || !(o.eps > 0.0))
        throw Error(Errc::invalid_argument, "repulsion_loss: invalid options");
    const Eigen::Index n = x.rows();
    RepulsionLoss out;
    out.grad_points = Points2::Zero(n, 2);
    out.grad_tangents = Points2::Zero(n, 2);
    constexpr double tangent_guard = 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d ti = t.row(i).transpose();
        const double tn = std::sqrt(ti.squaredNorm() + tangent_guard);
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::Index gap = std::abs(i - j);
            if (closed)
                gap = std::min(gap, n - gap);
            if (gap <= o.window)
                continue;
            const Eigen::Vector2d d = (x.row(i) - x.row(j)).transpose();
            const double s = d.squaredNorm() + o.eps;
            const double c = (ti.x() * d.y() - ti.y() * d.x()) / tn;
            const double ac = std::abs(c);
            const double denom = std::pow(s, 0.5 * o.beta);
            const double num = std::pow(ac, o.alpha);
            out.value += num / denom;
            const double dE_dc = o.alpha * c * std::pow(ac, o.alpha - 2.0) / denom;
            const double dE_ds = -0.5 * o.beta * num / (denom * s);
            const Eigen::Vector2d dc_dd = Eigen::Vector2d(-ti.y(), ti.x()) / tn;
            const Eigen::Vector2d dc_dt = Eigen::Vector2d(d.y(), -d.x()) / tn - c * ti / (tn * tn);
            const Eigen::Vector2d gd = dE_dc * dc_dd + dE_ds * 2.0 * d;
            out.grad_points.row(i) += gd.transpose();
            out.grad_points.row(j) -= gd.transpose();
            out.grad_tangents.row(i) += (dE_dc * dc_dt).transpose();
        }
    }
    return out;
}

ImageLoss overlap_cost(const Canvas& rendered) {
    if (rendered.channels != 1)
        throw Error(Errc::invalid_argument, "overlap_cost: expects a single-channel render");
    ImageLoss out;
    out.grad = Canvas(rendered.width, rendered.height, 1);
    for (size_t i = 0; i < rendered.size(); ++i) {
        const double v = rendered.pixels[i] - 0.5;
        if (v > 0.0) {
            out.value += v;
            out.grad.pixels[i] = 1.0;
        }
    }
    return out;
}

GeomLoss alignment_cost(const Points2& c, double eps) {
    if (c.rows() < 3)
        throw Error(Errc::invalid_argument, "alignment_cost: need at least 3 centers");
    GeomLoss out;
    out.grad = Points2::Zero(c.rows(), 2);
    for (Eigen::Index i = 1; i + 1 < c.rows(); ++i) {
        const Eigen::Vector2d e1 = (c.row(i) - c.row(i - 1)).transpose();
        const Eigen::Vector2d e2 = (c.row(i + 1) - c.row(i)).transpose();
        const double cr = e1.x() * e2.y() - e1.y() * e2.x();
        const double dt = e1.dot(e2);
        const double theta = std::atan2(cr, dt);
        out.value += std::abs(theta);
        const double sign = theta > 0.0 ? 1.0 : (theta < 0.0 ? -1.0 : 0.0);
        if (sign == 0.0)
            continue;
        const double r2 = cr * cr + dt * dt + eps;
        const Eigen::Vector2d g1 = sign * (dt * Eigen::Vector2d(e2.y(), -e2.x()) - cr * e2) / r2;
        const Eigen::Vector2d g2 = sign * (dt * Eigen::Vector2d(-e1.y(), e1.x()) - cr * e1) / r2;
        // e1 = c_i - c_{i-1}, e2 = c_{i+1} - c_i
        out.grad.row(i - 1) -= g1.transpose();
        out.grad.row(i) += (g1 - g2).transpose();
        out.grad.row(i + 1) += g2.transpose();
    }
    return out;
}

int self_intersections(const Points2& p, bool closed) {
    const Eigen::Index n = p.rows();
    const Eigen::Index segs = closed ? n : n - 1;
    if (segs < 2)
        return 0;
    auto orient = [](const Eigen::RowVector2d& a, const Eigen::RowVector2d& b, const Eigen::RowVector2d& c) {
        return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    };
    int count = 0;
    for (Eigen::Index i = 0; i < segs; ++i)
        for (Eigen::Index j = i + 2; j < segs; ++j) {
            if (closed && i == 0 && j == segs - 1)
                continue;
            const Eigen::RowVector2d a = p.row(i), b = p.row((i + 1) % n);
            const Eigen::RowVector2d c = p.row(j), d = p.row((j + 1) % n);
            const double o1 = orient(a, b, c), o2 = orient(a, b, d);
            const double o3 = orient(c, d, a), o4 = orient(c, d, b);
            if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
                o4 != 0)
                ++count;
        }
    return count;
}

void LossCombiner::add(const std::string& name, double weight, double value, std::function<void(double)> route) {
    if (!(weight >= 0.0) || !std::isfinite(weight))
        throw Error(Errc::invalid_argument, "loss term '" + name + "' has an invalid weight");
    if (weight == 0.0)
        return;
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "loss term '" << name << "' is not finite (value " << value << ", weight " << weight << ")";
        throw Error(Errc::numeric, msg.str());
    }
    total_ += weight * value;
    terms_.emplace_back(name, value);
    if (route)
        routes_.emplace_back(weight, std::move(route));
}

void LossCombiner::route() const {
    for (const auto& [w, fn] : routes_)
        fn(w);
}

// ---------------------------------------------------------------------------
// Subprocess provider

struct SubprocessProvider::Impl {
    pid_t pid = -1;
    int fd = -1;

    void send_all(const void* data, size_t n) {
        const auto* p = static_cast<const char*>(data);
        while (n > 0) {
            const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
            if (w < 0) {
                if (errno == EINTR)
                    continue;
                throw Error(Errc::io, std::string("provider: write failed: ") + std::strerror(errno));
            }
            p += w;
            n -= static_cast<size_t>(w);
        }
    }

    void recv_all(void* data, size_t n) {
        auto* p = static_cast<char*>(data);
        while (n > 0) {
            const ssize_t r = ::read(fd, p, n);
            if (r < 0 && errno == EINTR)
                continue;
            if (r <= 0)
                throw Error(Errc::io, "provider: unexpected end of response");
            p += r;
            n -= static_cast<size_t>(r);
        }
    }

    std::string recv_line() {
        std::string line;
        char ch = 0;
        while (true) {
            recv_all(&ch, 1);
            if (ch == '\n')
                return line;
            line.push_back(ch);
            if (line.size() > 4096)
                throw Error(Errc::io, "provider: header line too long");
        }
    }
};

SubprocessProvider::SubprocessProvider(const std::string& command) : impl_(std::make_unique<Impl>()) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
        throw Error(Errc::io, std::string("provider: socketpair failed: ") + std::strerror(errno));
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        throw Error(Errc::io, std::string("provider: fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(sv[1]);
    impl_->pid = pid;
    impl_->fd = sv[0];
}

SubprocessProvider::~SubprocessProvider() {
    if (!impl_ || impl_->pid < 0)
        return;
    try {
        impl_->send_all("\n", 1);
    } catch (const Error&) {
    }
    ::shutdown(impl_->fd, SHUT_WR);
    ::close(impl_->fd);
    int status = 0;
    for (int i = 0; i < 200; ++i) {
        if (::waitpid(impl_->pid, &status, WNOHANG) == impl_->pid)
            return;
        ::usleep(10000);
    }
    ::kill(impl_->pid, SIGKILL);
    ::waitpid(impl_->pid, &status, 0);
}

ProviderResult SubprocessProvider::operator()(int step, const Canvas& image) {
    const std::vector<std::uint8_t> png = encode_png(image, 16);
    const std::string header =
        "BSVG-PROVIDER 1 STEP " + std::to_string(step) + " PNG " + std::to_string(png.size()) + "\n";
    impl_->send_all(header.data(), header.size());
    impl_->send_all(png.data(), png.size());

    std::istringstream in(impl_->recv_line());
    std::string magic, loss_kw, loss_str;
    int version = 0;
    long h = 0, w = 0, c = 0;
    in >> magic >> version >> h >> w >> c >> loss_kw >> loss_str;
    if (!in || magic != "BSVG-GRAD" || version != 1 || loss_kw != "LOSS")
        throw Error(Errc::io, "provider: malformed response header");
    if (h != image.height || w != image.width || c != image.channels)
        throw Error(Errc::dimension_mismatch, "provider: gradient shape does not match the render");
    ProviderResult out;
    if (loss_str != "none") {
        char* end = nullptr;
        const double v = std::strtod(loss_str.c_str(), &end);
        if (end == loss_str.c_str() || *end != '\0')
            throw Error(Errc::io, "provider: malformed loss value");
        if (!std::isfinite(v))
            throw Error(Errc::numeric, "provider: non-finite loss");
        out.loss = v;
    }
    const size_t count = static_cast<size_t>(h * w * c);
    std::vector<std::uint8_t> raw(count * 4);
    impl_->recv_all(raw.data(), raw.size());
    out.grad = Canvas(image.width, image.height, image.channels);
    for (size_t i = 0; i < count; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f))
            throw Error(Errc::numeric, "provider: non-finite gradient value");
        out.grad.pixels[i] = f;
    }
    return out;
}

GradientProvider make_subprocess_provider(const std::string& command) {
    auto proc = std::make_shared<SubprocessProvider>(command);
    return [proc](int step, const Canvas& image) { return (*proc)(step, image); };
}

} // namespace bsvg

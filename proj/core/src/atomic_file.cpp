#include "cartometry/atomic_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cartometry/error.hpp"

namespace carto {
namespace {

std::atomic<unsigned long> temp_counter{0};

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& path, int err) {
    throw Error(ErrorCode::io_error, what + " " + path.string() + ": " + std::strerror(err));
}

class FileDescriptor {
public:
    explicit FileDescriptor(int fd) : fd_(fd) {}
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;
    ~FileDescriptor() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const noexcept { return fd_; }
    int release() noexcept { return std::exchange(fd_, -1); }

private:
    int fd_;
};

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : ".";
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(temp_counter++);

    FileDescriptor fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) fail("cannot create", tmp, errno);

    auto discard = [&](const char* what) {
        const int err = errno;
        ::close(fd.release());
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        fail(what, tmp, err);
    };

    const char* data = contents.data();
    std::size_t left = contents.size();
    while (left > 0) {
        const ssize_t n = ::write(fd.get(), data, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            discard("cannot write");
        }
        data += n;
        left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) discard("cannot sync");
    if (::close(fd.release()) != 0) {
        const int err = errno;
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        fail("cannot close", tmp, err);
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        const int err = errno;
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        fail("cannot replace", path, err);
    }
    FileDescriptor dir_fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
    if (dir_fd.get() >= 0) ::fsync(dir_fd.get());
}

std::string read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) fail("cannot read", path, EISDIR);
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open", path, errno ? errno : ENOENT);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail("cannot read", path, errno);
    return buffer.str();
}

}  // namespace carto

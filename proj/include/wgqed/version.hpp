#ifndef WGQED_VERSION_HPP
#define WGQED_VERSION_HPP

#define WGQED_VERSION "0.1.0"

#endif

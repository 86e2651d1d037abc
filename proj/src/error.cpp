// SPDX-License-Identifier: Apache-2.0

#include "fdadm/error.hpp"

#include <iostream>
#include <mutex>

namespace fdadm
{
    namespace
    {
        std::mutex sink_mutex;

        WarningSink &current_sink()
        {
            static WarningSink sink = [](std::string_view msg)
            { std::cerr << "warning: " << msg << '\n'; };
            return sink;
        }
    }

    WarningSink set_warning_sink(WarningSink sink)
    {
        std::lock_guard lock(sink_mutex);
        WarningSink previous = std::move(current_sink());
        current_sink() = std::move(sink);
        return previous;
    }

    void warn(std::string_view message)
    {
        std::lock_guard lock(sink_mutex);
        if (current_sink())
            current_sink()(message);
    }
}
